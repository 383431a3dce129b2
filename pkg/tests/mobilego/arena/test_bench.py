import math

import pandas as pd
import pytest

from mobilego.arena import bench
from mobilego.models import netspec, network
from mobilego.utils import exception

SPEC = netspec.NetworkSpec("mobile_bottleneck", 1, 8, 16, "fully_convolutional", board=9)


def test_throughput_bench(tmp_path):
    report = bench.throughput_bench(network.PolicyValueNet(SPEC), [1, 4], duration=0.05)

    assert [r.batch for r in report.rows] == [1, 4]
    assert all(r.speed > 0 and not r.failed for r in report.rows)
    assert all(r.name == SPEC.name for r in report.rows)

    path = tmp_path / "speed.csv"
    report.to_csv(path)

    assert list(pd.read_csv(path).columns) == ["name", "batch", "device", "speed"]


def test_throughput_bench_out_of_memory(monkeypatch):
    net = network.PolicyValueNet(SPEC)
    predict = net.predict

    def limited(x, mode="infer"):
        if len(x) > 2:
            raise RuntimeError("CUDA out of memory. Tried to allocate 2.00 GiB")
        return predict(x, mode)

    monkeypatch.setattr(net, "predict", limited)

    report = bench.throughput_bench(net, [2, 8, 1], duration=0.02)

    assert [r.failed for r in report.rows] == [False, True, False]
    assert math.isnan(report.rows[1].speed)


def test_throughput_bench_errors():
    net = network.PolicyValueNet(SPEC)

    with pytest.raises(exception.ValueError):
        bench.throughput_bench(net, [])

    with pytest.raises(exception.ValueError):
        bench.throughput_bench(net, [0])

    with pytest.raises(exception.ValueError):
        bench.throughput_bench(net, [1], duration=0)


def test_throughput_bench_label(tmp_path):
    net = network.PolicyValueNet(SPEC)
    report = bench.throughput_bench(net, [1], duration=0.02, label="Snapdragon 888")

    assert report.rows[0].device == "Snapdragon 888"
    assert net.device == "cpu"

    path = tmp_path / "speed.csv"
    report.to_csv(path)

    assert list(pd.read_csv(path)["device"]) == ["Snapdragon 888"]
    assert bench.throughput_bench(net, [1], duration=0.02).rows[0].device == "cpu"
