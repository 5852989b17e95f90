import numpy as np
import pytest

from diracflow.flow import Reference, get_observer_from_name, initial_state, observer_registry
from tests.helpers import complex_of


class TestObservers:
    def test_initial_values(self):
        s = initial_state(complex_of("complete:2"))
        ref = Reference.of(s)
        values = {name: get_observer_from_name(name)(s, ref) for name in observer_registry}
        assert values["t"] == 0.0
        assert values["tr_M"] == pytest.approx(4.0)
        assert values["tr_D2"] == pytest.approx(4.0)
        assert values["tr_b2"] == 0.0
        assert values["spec_drift"] == pytest.approx(0.0, abs=1e-12)
        assert values["l_drift"] == pytest.approx(0.0, abs=1e-12)
        assert values["str_U_re"] == 1.0
        assert values["str_U_im"] == 0.0
        assert values["norm_d"] == 1.0
        assert values["norm_b"] == 0.0
        assert values["unitarity"] == 0.0

    def test_without_unitary(self):
        s = initial_state(complex_of("complete:2"), with_unitary=False)
        ref = Reference.of(s)
        for name in ("str_U_re", "str_U_im", "unitarity"):
            assert np.isnan(get_observer_from_name(name)(s, ref))

    def test_k2_limit(self, k2_run):
        _, traj = k2_run
        s = traj.final
        ref = Reference.of(traj.initial)
        assert get_observer_from_name("tr_b2")(s, ref) == pytest.approx(4.0, abs=1e-8)
        assert get_observer_from_name("tr_M")(s, ref) < 1e-6

    def test_unknown(self):
        with pytest.raises(NotImplementedError):
            get_observer_from_name("entropy")
