"""Smoke test for the sgo extension module.

    maturin develop -m crates/sgo-py/Cargo.toml --release
    python python/smoke_test.py
"""

import json

import sgo

IDENTITY_2 = {"n": 2, "precision": "inf", "entries": [[[[0, 1, 1]], []], [[], [[0, 1, 1]]]]}
SHIFTED = {"n": 2, "precision": "inf", "entries": [[[[1, 1, 1]], []], [[[0, 1, 1]], [[1, 1, 1]]]]}


def main():
    zero = sgo.SuperWeight.zero(1, 2)
    alpha = sgo.RootVector.simple(1, 2, 1)
    w = zero - alpha.to_weight()
    assert w.lam == [-1] and w.theta == [1, 0], w
    assert w.leq(zero) and not zero.leq(w)
    assert zero.decompose(w) == alpha
    assert sgo.SuperWeight.from_json(w.to_json()) == w
    assert alpha.zastava_dim() == 1
    assert sgo.RootVector.simple(1, 3, 3).zastava_dim() == 2

    assert sgo.classify(json.dumps(IDENTITY_2), 1, 2) == zero
    got = sgo.classify(json.dumps(SHIFTED), 1, 2)
    assert (got.lam, got.theta) == ([1], [0, 1]), got
    assert sgo.semi_infinite(json.dumps(IDENTITY_2), 1, 2) == zero

    ws = sgo.orbit_weights(1, 3, 1)
    relevant = [x for x in ws if x.is_relevant()]
    assert sgo.SuperWeight.zero(1, 3) in relevant
    assert all(x.is_hw_dominant() for x in relevant)

    w_o = sgo.SuperWeight([0], [-1, 1])
    dim, bound, witnesses = sgo.intersection_dim_bound(w_o, zero)
    assert (dim, bound) == (2, 1) and witnesses

    divisor = {"points": {"x1": {"lambda": [-1], "theta": [1, 0], "theta_prime": []}}}
    assert sgo.line_bundle_exponents(json.dumps(divisor)) == {"x1": 0}

    report = json.loads(sgo.run_suite("prop81", 1, 3, samples=20, seed=7))
    assert report["pass"], report
    try:
        sgo.run_suite("nonsense", 1, 3)
    except sgo.SgoError:
        pass
    else:
        raise AssertionError("unknown suite accepted")

    print(f"ok: {len(ws)} orbit indices, {len(relevant)} relevant, prop81 {report['trials']} trials")


if __name__ == "__main__":
    main()
