import pytest


def write_table(path, rows, header="h,rmse,stderr,epochs,wallclock_s", meta=None):
    lines = [f"# meta: {k}={v}" for k, v in sorted((meta or {}).items())]
    lines.append(header)
    lines.extend(",".join(repr(float(v)) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def make_table():
    return write_table


@pytest.fixture
def slope2_csv(tmp_path):
    """Exact rmse = 0.3 h^2 on a four-point grid."""
    rows = [(h, 0.3 * h**2, 1e-6, 100, 0.1) for h in (0.001, 0.002, 0.004, 0.008)]
    meta = {"optimizer": "hb", "strategy": "sms", "mode": "bias"}
    return write_table(tmp_path / "slope2.csv", rows, meta=meta)
