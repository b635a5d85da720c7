import pytest

from ellis_lab.groups import (
    FiniteGroup,
    cyclic,
    dihedral,
    direct_product,
    find_isomorphism,
    is_homomorphism,
    quaternion,
    standard_groups,
    symmetric,
    table_is_group,
)


@pytest.mark.parametrize("name,grp", sorted(standard_groups().items()))
def test_standard_groups_are_groups(name, grp):
    assert table_is_group(grp.table)
    for g in range(grp.order):
        assert grp.mul(g, grp.inverse[g]) == grp.identity


def test_orders_and_subgroup_counts():
    assert symmetric(3).order == 6 and dihedral(4).order == 8 and quaternion().order == 8
    assert len(cyclic(12).subgroups()) == 6  # one per divisor
    assert len(symmetric(3).subgroups()) == 6
    assert len(symmetric(3).normal_subgroups()) == 3
    assert len(dihedral(4).subgroups()) == 10
    assert len(quaternion().subgroups()) == 6
    assert len(quaternion().normal_subgroups()) == 6


def test_isomorphism_search():
    assert find_isomorphism(cyclic(6), direct_product(cyclic(2), cyclic(3))) is not None
    assert find_isomorphism(cyclic(4), direct_product(cyclic(2), cyclic(2))) is None
    assert find_isomorphism(dihedral(4), quaternion()) is None
    assert find_isomorphism(symmetric(3), dihedral(3)) is not None
    q = quaternion()
    phi = find_isomorphism(q, q)
    assert is_homomorphism(q.table, q.table, phi)


def test_quotient():
    g = cyclic(12)
    n = g.generated([4])
    quot, proj = g.quotient(n)
    assert quot.order == 4
    assert find_isomorphism(quot, cyclic(4)) is not None
    assert all(proj[g.mul(a, b)] == quot.mul(proj[a], proj[b]) for a in range(12) for b in range(12))


def test_bad_tables_rejected():
    assert not table_is_group([[0, 1], [0, 1]])
    # a Latin square with identity that is not associative (order 5 loop)
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    assert not table_is_group(loop)
    with pytest.raises(ValueError):
        FiniteGroup.from_json({"order": 3, "table": cyclic(2).table})
    assert FiniteGroup.from_json(cyclic(5).to_json()).table == cyclic(5).table
