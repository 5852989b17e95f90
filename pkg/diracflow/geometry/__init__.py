from diracflow.geometry.complex import (  # noqa
    OrientedComplex,
    build_complex,
    euler_characteristic,
    reorient,
)
from diracflow.geometry.graph import (  # noqa
    Graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    empty_graph,
    graph_from_spec,
    parse_graph,
    path_graph,
    random_graph,
    read_graph,
    star_graph,
)
from diracflow.geometry.operators import (  # noqa
    GradedOperator,
    Grading,
    betti,
    betti_from_derivative,
    betti_numbers,
    dirac,
    dump_operator,
    exterior_derivative,
    grading_involution,
    laplacian,
    load_operator,
    numerical_rank,
    split,
    superpartner_pairs,
    supertrace,
)
