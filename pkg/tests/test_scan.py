import xml.etree.ElementTree as ET

import numpy as np
import pytest

from ricciscope import svg
from ricciscope.fibration import GLOBAL_MAX
from ricciscope.scan import (
    COLUMNS,
    SamplerConfig,
    ScanRow,
    grid_cells,
    ledger_obata_pipeline,
    region_scan,
    ricci_image_scan,
    rows_from_csv,
    rows_to_csv,
    schema_text,
    stiefel_pipeline,
)
from ricciscope.spaces import ledger_obata as lo


def test_grid_cells():
    cells = grid_cells((0, 1), (0, 2), 2)
    assert cells == [(0.25, 0.5), (0.75, 0.5), (0.25, 1.5), (0.75, 1.5)]
    assert grid_cells((0, 1), (0, 1), 0) == []


def test_empty_csv_is_header_only():
    assert rows_to_csv([]) == ",".join(COLUMNS) + "\r\n"


def test_csv_round_trip():
    rows = [
        ScanRow("stiefel", 0.1, 0.2, (1.0, 0.1, 0.2, 0.0, 0.0), True, False, "LocalMax", 3.5, 1 / 3, GLOBAL_MAX, 0.1, (1.0, 2.0)),
        ScanRow("ledger-obata", -0.3, 0.4, error='DomainError: bad, "quoted"'),
    ]
    assert rows_from_csv(rows_to_csv(rows)) == rows


def test_schema_lists_columns():
    text = schema_text()
    for c in COLUMNS:
        assert f"\n{c}: " in text


def test_ricci_image_deterministic_and_threaded():
    cfg = SamplerConfig(n=4000, seed=7, chunk=500)
    a = ricci_image_scan(config=cfg)
    b = ricci_image_scan(config=cfg, threads=4)
    assert rows_to_csv(a) == rows_to_csv(b)
    assert len(a) > 0
    assert all(r.T[0] == 1.0 and r.u > 0 and r.v > 0 for r in a)


def test_ricci_image_rows_are_ricci_tensors():
    from ricciscope.spaces.stiefel import stiefel_family

    fam = stiefel_family()
    rows = ricci_image_scan(config=SamplerConfig(n=300, seed=1))
    for r in rows[:20]:
        ric = fam.ricci(r.g)
        assert np.allclose(ric / ric[0], r.T, atol=1e-12)


def test_lo_pipeline_rejects_non_definite():
    row = ledger_obata_pipeline()((0.4, 0.4))
    assert row.error.startswith("DomainError")


def test_lo_pipeline_matches_triangle():
    pipe = ledger_obata_pipeline()
    for x, y in [(0.0, 0.0), (0.1, 0.01), (-0.2, 0.3), (0.3, 0.1)]:
        row = pipe((x, y))
        assert (row.verdict == GLOBAL_MAX) == lo.guaranteed_condition(lo.from_xy(x, y))


def test_lo_pipeline_solve():
    row = ledger_obata_pipeline(solve=True)((0.0, 0.0))
    assert row.has_diag_critical and row.classification == "LocalMax"
    assert row.S is not None and len(row.g) == 3


def test_stiefel_pipeline_cells():
    pipe = stiefel_pipeline()
    assert pipe((0.75, 0.75)).verdict == GLOBAL_MAX
    assert pipe((-0.1, 0.5)).error


def test_stiefel_pipeline_solve():
    row = stiefel_pipeline(solve=True, n_random=2)((0.5, 0.5))
    assert row.has_diag_critical and row.classification == "LocalMax"


def test_region_scan_order_and_threads():
    cells = grid_cells((-0.4, 0.4), (-0.4, 0.4), 5)
    pipe = ledger_obata_pipeline()
    a = region_scan(pipe, cells)
    b = region_scan(pipe, cells, threads=3)
    assert rows_to_csv(a) == rows_to_csv(b)
    assert [r.params for r in a] == cells


def test_svg_region_and_scatter():
    cells = grid_cells((-0.5, 0.5), (-0.5, 0.5), 6)
    rows = region_scan(ledger_obata_pipeline(), cells)
    for text in (svg.render(rows, cell=(1 / 6, 1 / 6), title="t"), svg.render(rows)):
        root = ET.fromstring(text.encode())
        assert root.tag.endswith("svg") and root.get("version") == "1.1"
    assert svg.render([]).startswith("<?xml")
    assert svg.default_key(rows[0]) == "error"
