import math

from sublab.records import FIELDS, ExperimentRecord, to_csv


def test_ratio_recomputable():
    rec = ExperimentRecord.make("x", 3 + 4j, 2.0, p=7)
    assert rec.ratio == 2.5
    assert ExperimentRecord.make("x", 1.0, 0.0).ratio is None


def test_csv_layout_and_order():
    rows = [ExperimentRecord.make("b", 0.1, 1.0, p=5), ExperimentRecord.make("a", 1 / 3, 1.0, p=7, tuple_id=2),
            ExperimentRecord.make("a", 1 / 3, 1.0, p=7, tuple_id=1).with_slope(0.5)]
    text = to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(FIELDS)
    assert lines[1].startswith("a,7,0,0,0,0,1,0.33333333333333331,0,1,0.33333333333333331,0.5")
    assert lines[3].startswith("b,5")
    assert text == to_csv(reversed(rows))
    for line in lines[1:]:
        cells = line.split(",")
        re_, im, bound, ratio = (float(cells[i]) for i in (7, 8, 9, 10))
        assert math.isclose(ratio, math.hypot(re_, im) / bound, rel_tol=1e-15)
