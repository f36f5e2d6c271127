"""Smoke test for the relu_forge Python module.

Run after `pip install --no-build-isolation crates/relu_forge_py`, or with the compiled
library copied next to this file as relu_forge.so.
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import relu_forge as rf


def main():
    approx = rf.build_approximant("abs", 2, 2)
    net = approx.network
    assert approx.k == 16, approx.k
    assert abs(approx.bound_outside_trifling - 1.125) < 1e-12
    assert net.width <= 32 and net.depth <= 38, (net.width, net.depth)

    report = rf.certify(approx, "abs", samples=2000)
    assert report["pass"], report

    doc = net.to_json()
    assert json.loads(doc)["format_version"] == 1
    again = rf.ReluNetwork.from_json(doc)
    xs = [[i / 997] for i in range(998)]
    assert again.evaluate_many(xs) == net.evaluate_many(xs)

    mid = rf.gadget_mid3()
    assert mid.evaluate([3.0, -1.0, 2.0]) == [2.0]

    bits = rf.bit_extract_net(3)
    # 0.101 in binary; the first two bits sum to 1
    assert abs(bits.evaluate([0.625, 2.0])[0] - 1.0) < 1e-9

    assert rf.cost(4, 2, 1) == 32
    assert abs(rf.cost(2, 3, 4) - 3 * (1 + math.log(2))) < 1e-12
    assert rf.plan(0.01, 1.0, 2, 1) == (2, 50, "case1", rf.cost(2, 50, 1))

    try:
        rf.build_approximant("no_such_target", 1, 1)
    except ValueError as e:
        assert "unknown fixture" in str(e)
    else:
        raise AssertionError("expected ValueError")

    print("relu_forge smoke test passed")


if __name__ == "__main__":
    main()
