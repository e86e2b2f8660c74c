import math
import subprocess

import numpy as np
import pytest

from plotkit import PlotSpec, render_esd, semicircle_density
from plotkit.cli import main
from plotkit.render import SchemaError, read_histogram

HEADER = "bin_lo,bin_hi,density,count\n"


def _write_histogram(path, radius=2.0, bins=40, n=2000, lo=None, hi=None, seed=5):
    """Sample histogram file in the harness schema."""
    rng = np.random.default_rng(seed)
    lo = -1.5 * radius if lo is None else lo
    hi = 1.5 * radius if hi is None else hi
    # crude semicircle-ish draws: uniform thinned by the density
    xs = rng.uniform(-radius, radius, 4 * n)
    keep = rng.uniform(0, 2 / (math.pi * radius), 4 * n) <= semicircle_density(xs, radius)
    xs = xs[keep][:n]
    counts, edges = np.histogram(xs, bins=bins, range=(lo, hi))
    width = (hi - lo) / bins
    rows = [
        f"{float(edges[b])!r},{float(edges[b + 1])!r},{float(counts[b] / (n * width))!r},{counts[b]}"
        for b in range(bins)
    ]
    path.write_text(HEADER + "\n".join(rows) + "\n")
    return path


def test_read_histogram_roundtrip(tmp_path):
    f = _write_histogram(tmp_path / "h.csv")
    lo, hi, dens, cnt = read_histogram(f)
    assert lo.size == 40 and cnt.sum() == 2000


@pytest.mark.parametrize(
    "text",
    [
        "",
        "a,b,c\n1,2,3\n",
        HEADER + "0,1,0.5\n",
        HEADER + "0,1,x,3\n",
        HEADER + "1,0,0.5,3\n",
        HEADER + "0,1,0.5,3\n0.5,1.5,0.5,3\n",
        HEADER + "0,1,-0.5,3\n",
        HEADER,
    ],
)
def test_read_histogram_schema_errors(tmp_path, text):
    f = tmp_path / "bad.csv"
    f.write_text(text)
    with pytest.raises(SchemaError):
        read_histogram(f)


def test_render_svg_and_curve_properties(tmp_path):
    f = _write_histogram(tmp_path / "h.csv", radius=2.0)
    out = tmp_path / "fig.svg"
    res = render_esd(PlotSpec(histogram=f, radius=2.0, title="demo", out=out))
    assert out.exists()
    assert out.read_text().startswith("<?xml")
    assert res.peak == pytest.approx(2 / (math.pi * 2.0), rel=1e-12)
    assert abs(res.curve_integral - 1.0) <= 0.01
    assert res.curve_x.size >= 400


def test_render_png(tmp_path):
    f = _write_histogram(tmp_path / "h.csv")
    out = tmp_path / "fig.png"
    render_esd(PlotSpec(histogram=f, radius=2.0, title="demo", out=out, format="png"))
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_deterministic_bytes(tmp_path):
    f = _write_histogram(tmp_path / "h.csv")
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    render_esd(PlotSpec(histogram=f, radius=2.0, title="same", out=a))
    render_esd(PlotSpec(histogram=f, radius=2.0, title="same", out=b))
    assert a.read_bytes() == b.read_bytes()


def test_render_rejects_empty_histogram(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text(HEADER + "0,1,0,0\n1,2,0,0\n")
    out = tmp_path / "never.svg"
    with pytest.raises(SchemaError):
        render_esd(PlotSpec(histogram=f, radius=1.0, title="x", out=out))
    assert not out.exists()


def test_plotspec_validation(tmp_path):
    with pytest.raises(ValueError):
        PlotSpec(histogram="h.csv", radius=0.0, title="x", out="o.svg")
    with pytest.raises(ValueError):
        PlotSpec(histogram="h.csv", radius=1.0, title="x", out="o.gif", format="gif")


def test_cli_success_and_errors(tmp_path, capsys):
    f = _write_histogram(tmp_path / "h.csv")
    out = tmp_path / "fig.svg"
    rc = main(["--histogram", str(f), "--radius", "2.0", "--title", "t", "--out", str(out)])
    assert rc == 0 and out.exists()
    assert "wrote" in capsys.readouterr().out

    assert main(["--histogram", str(f), "--radius", "-1", "--title", "t",
                 "--out", str(tmp_path / "x.svg")]) == 2
    assert main(["--histogram", str(tmp_path / "missing.csv"), "--radius", "2",
                 "--title", "t", "--out", str(tmp_path / "x.svg")]) == 4

    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["--histogram", str(f), "--radius", "2", "--title", "t",
                 "--out", str(blocker / "sub.svg")]) == 4


def test_cli_installed_entry_point(tmp_path):
    f = _write_histogram(tmp_path / "h.csv")
    out = tmp_path / "fig.svg"
    proc = subprocess.run(
        ["render-esd", "--histogram", str(f), "--radius", "2.0",
         "--title", "cli", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
