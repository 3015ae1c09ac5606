"""Small builders shared by the test modules."""

from ggt.carrier import Carrier, OperationSystem, PartialOperation, Tier


def unary(n, tables, names=None):
    names = names or [f"f{i}" for i in range(len(tables))]
    ops = tuple(PartialOperation(nm, 1, n, tuple(t)) for nm, t in zip(names, tables))
    return OperationSystem(Carrier.of_size(n), Tier.UNARY, ops)


def raw_ops(system):
    """(arity, table-with-None) pairs for the oracle."""
    return [(f.arity, [None if not isinstance(v, int) else v for v in f.table])
            for f in system.members]


def as_key(m):
    return tuple(m.values)
