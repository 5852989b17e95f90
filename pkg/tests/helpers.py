from diracflow.flow import FlowRunner, initial_state
from diracflow.geometry import build_complex, graph_from_spec


def complex_of(spec, seed=0):
    return build_complex(graph_from_spec(spec, seed))


def run(spec, t_end, beta=0.0, gamma=None, h=1e-3, snapshot_every=10, with_unitary=True, seed=0):
    c = complex_of(spec, seed)
    state = initial_state(c, beta=beta, gamma=gamma, with_unitary=with_unitary)
    return c, FlowRunner(state, t_end, h=h, snapshot_every=snapshot_every).run()
