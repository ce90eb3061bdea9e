"""Smoke test for the pyhypergame extension.

Build it, then run this script with the module on PYTHONPATH:

    cargo build --release -p hypergame-python --features extension-module
    cp target/release/libpyhypergame.so python/pyhypergame.so
    python3 python/smoke_test.py
"""

import pyhypergame as hg


def main():
    assert str(hg.Type("(forall Y. Y) -> (forall Y. Y)").prenex()) == "forall Y. (forall Y'. Y') -> Y"

    ty = hg.Type("X -> (X -> X) -> X")
    two = hg.Term("\\x:X. \\f:X -> X. f (f x)")
    sigma = hg.compile(two, ty)
    assert sigma.plays() == [[(0, 1), (1, 2), (2, 1), (1, 2), (4, 1), (1, 1)]]
    assert hg.readback(sigma, ty).alpha_eq(two)
    assert hg.Strategy.parse(sigma.to_text()) == sigma

    assert hg.check(hg.Type("forall G. G -> G -> G")) == (2, 2, True)
    assert len(hg.strategies(hg.Type("X -> Y -> X"), 2, mode="lambda", copycat=False)) == 2

    t = hg.Term("(/\\G. \\g:G. g) [forall G. G -> G] (/\\G. \\g:G. g)")
    assert t.normalize_via_games().alpha_eq(t.normalize())
    try:
        t.normalize_via_games(budget=1)
    except RuntimeError:
        pass
    else:
        raise AssertionError("budget should trip")
    try:
        hg.Type("X ->")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error expected")
    print("smoke test passed")


if __name__ == "__main__":
    main()
