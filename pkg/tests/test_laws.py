import pytest

from oracles import subsets_up_to
from tca.laws import exhaustive_crossed_laws, exhaustive_kernel_laws, support_subsets
from tca.specs import build_system, builtin_system
from tca.system import TableCocycle, TwistedSystem


def test_subset_count():
    g = builtin_system("C6-bicharacter").group
    subs = support_subsets(g, 3)
    assert len(subs) == 6 + 15 + 20 == 41
    assert subs == subsets_up_to(g.elements(), 3)


@pytest.mark.parametrize("name", ["C4-spectrum", "C4-standard", "C2xC4-coboundary"])
def test_sweeps_clean_on_valid_systems(name):
    sys = builtin_system(name)
    res = {**exhaustive_crossed_laws(sys, 2, 0), **exhaustive_kernel_laws(sys, 2, 0)}
    assert set(res) == {"crossed.unit", "crossed.involutivity", "crossed.anti_multiplicativity",
                        "crossed.associativity", "kernel.involutivity", "kernel.anti_multiplicativity",
                        "kernel.associativity"}
    assert all(v < 1e-12 for v, _ in res.values())


def test_sweeps_detect_broken_cocycle():
    base = build_system("C4", cocycle="bicharacter:[[1]]")
    table = {(x, y): base.omega(x, y) for x in base.group.elements() for y in base.group.elements()}
    table[(1,), (2,)] = -table[(1,), (2,)]
    bad = TwistedSystem(base.group, base.model, base.action, TableCocycle(table))
    crossed = exhaustive_crossed_laws(bad, 2, 0)
    kernels = exhaustive_kernel_laws(bad, 2, 0)
    assert crossed["crossed.associativity"][0] > 1e-3
    assert kernels["kernel.associativity"][0] > 1e-3
    assert len(crossed["crossed.associativity"][1]["supports"]) == 3


def test_sweeps_need_finite_group():
    with pytest.raises(ValueError):
        exhaustive_crossed_laws(builtin_system("Z-trivial"), 1, 0)
