import math

import numpy as np
import pytest

from figkit import ColumnError, FigureSpec, concurrence_peak_times, read_series, render
from figkit.csvio import REQUIRED_COLUMNS, flat_top_envelope

PERIOD_FS = 210.0
SAMPLE_FS = 1.0


def synthetic_columns(t_end=1000.0):
    """Damped-oscillation series with concurrence maxima at known times."""
    t = np.arange(0.0, t_end + SAMPLE_FS / 2, SAMPLE_FS)
    env = np.where(t > 100.0, np.exp(-(t - 100.0) / 2000.0), 0.0)
    osc = np.sin(np.pi * (t - 100.0) / PERIOD_FS) ** 2
    c = 0.4 * env * osc
    g2 = np.where(t > 120.0, 0.2 + 4.0 * env * osc, np.nan)
    cols = {
        "t_fs": t,
        "n_qd1": 0.3 * env,
        "n_qd2": 0.5 * env,
        "n_pl": 0.01 * env,
        "n_cav1": 0.2 * env * (1 - osc),
        "n_cav2": 0.25 * env * (1 - osc),
        "n_total": 1.26 * env,
        "C": c,
        "C_ph": 0.4 * env * (1 - osc),
        "C_tot": 0.4 * env,
        "F2": 0.4 * env * (1 - osc),
        "g2_11": g2 * 0.5,
        "g2_22": g2 * 0.4,
        "g2_12": g2,
        "trace_err": np.full_like(t, 1e-12),
    }
    return cols


def expected_peak_times(t_end=1000.0):
    # maxima of sin^2(pi (t-100)/P) at t = 100 + (k + 1/2) P
    times = []
    k = 0
    while True:
        tm = 100.0 + (k + 0.5) * PERIOD_FS
        if tm > t_end:
            return times
        times.append(tm)
        k += 1


def write_csv(path, cols, config_extra=(), drop=()):
    names = [c for c in REQUIRED_COLUMNS if c not in drop]
    with open(path, "w") as fh:
        fh.write("# cavdot 0.1.0\n")
        fh.write("# scenario: synthetic\n")
        fh.write("# config:\n")
        fh.write("#   scenario: synthetic\n")
        fh.write("#   pulse_shape: gaussian\n")
        for line in config_extra:
            fh.write(f"#   {line}\n")
        fh.write(",".join(names) + "\n")
        n = len(cols["t_fs"])
        for i in range(n):
            row = []
            for name in names:
                v = cols[name][i]
                row.append("" if (isinstance(v, float) and math.isnan(v)) or np.isnan(v)
                           else repr(float(v)))
            fh.write(",".join(row) + "\n")
    return path


@pytest.fixture()
def csv_file(tmp_path):
    return write_csv(tmp_path / "synthetic.csv", synthetic_columns())


class TestReader:
    def test_reads_columns_and_config(self, csv_file):
        s = read_series(csv_file)
        assert s.config["scenario"] == "synthetic"
        assert s.n_rows == 1001
        assert math.isnan(s["g2_12"][0])
        assert s.sample_interval() == SAMPLE_FS

    def test_missing_column_named(self, tmp_path):
        cols = synthetic_columns()
        path = write_csv(tmp_path / "bad.csv", cols, drop=("g2_12",))
        with pytest.raises(ColumnError) as err:
            read_series(path)
        assert "g2_12" in str(err.value)

    def test_flat_top_envelope_reconstruction(self):
        config = {"t0_fs": 40.0, "t1_fs": 760.0, "delta_fs": 10.0,
                  "e_max_v_per_m": 2.0}
        t = np.array([40.0 + 360.0])  # mid-pulse
        assert flat_top_envelope(config, t)[0] == pytest.approx(2.0, rel=1e-6)
        far = flat_top_envelope(config, np.array([-500.0]))[0]
        assert far < 1e-10


class TestRender:
    @pytest.mark.parametrize("figure", ["fig2", "fig3", "fig4", "fig6"])
    def test_single_csv_layouts(self, figure, csv_file, tmp_path):
        out = tmp_path / f"{figure}.png"
        path, info = render(FigureSpec(figure=figure, csv_paths=(str(csv_file),),
                                       out_path=str(out)))
        assert out.exists() and out.stat().st_size > 5_000

    def test_fig5_two_csvs(self, csv_file, tmp_path):
        out = tmp_path / "fig5.png"
        render(FigureSpec(figure="fig5", csv_paths=(str(csv_file), str(csv_file)),
                          out_path=str(out), log_y=True))
        assert out.exists()

    def test_fig7_with_envelope(self, tmp_path):
        cols = synthetic_columns()
        path = write_csv(tmp_path / "cw.csv", cols, config_extra=(
            "pulse_shape: flat_top", "t0_fs: 40.0", "t1_fs: 760.0",
            "delta_fs: 10.0", "e_max_v_per_m: 2500000.0"))
        out = tmp_path / "fig7.png"
        render(FigureSpec(figure="fig7", csv_paths=(str(path),), out_path=str(out)))
        assert out.exists()

    def test_marker_times_match_known_maxima(self, csv_file, tmp_path):
        out = tmp_path / "fig3.png"
        _, info = render(FigureSpec(figure="fig3", csv_paths=(str(csv_file),),
                                    out_path=str(out)))
        got = info["marker_times_fs"]
        expected = expected_peak_times()
        assert len(got) == len(expected)
        for g, e in zip(got, expected):
            assert abs(g - e) <= SAMPLE_FS

    def test_deterministic_bytes(self, csv_file, tmp_path):
        out_a = tmp_path / "a.png"
        out_b = tmp_path / "b.png"
        spec = dict(figure="fig3", csv_paths=(str(csv_file),))
        render(FigureSpec(out_path=str(out_a), **spec))
        render(FigureSpec(out_path=str(out_b), **spec))
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_empty_csv_renders_warning_axes(self, tmp_path):
        cols = {k: np.array([]) for k in REQUIRED_COLUMNS}
        path = write_csv(tmp_path / "empty.csv", cols)
        out = tmp_path / "empty.png"
        render(FigureSpec(figure="fig2", csv_paths=(str(path),), out_path=str(out)))
        assert out.exists() and out.stat().st_size > 1_000

    def test_unknown_figure_rejected(self, csv_file, tmp_path):
        with pytest.raises(ValueError):
            FigureSpec(figure="fig9", csv_paths=(str(csv_file),),
                       out_path=str(tmp_path / "x.png"))


class TestPeaks:
    def test_peak_times_on_clean_series(self, csv_file):
        s = read_series(csv_file)
        times = concurrence_peak_times(s)
        expected = expected_peak_times()
        assert len(times) == len(expected)
        assert np.abs(np.asarray(times) - np.asarray(expected)).max() <= SAMPLE_FS

    def test_constant_series_has_no_peaks(self, tmp_path):
        cols = synthetic_columns()
        cols["C"] = np.full_like(cols["t_fs"], 0.3)
        path = write_csv(tmp_path / "const.csv", cols)
        assert len(concurrence_peak_times(read_series(path))) == 0


class TestCli:
    def test_render_via_cli(self, csv_file, tmp_path, capsys):
        from figkit.cli import main
        out = tmp_path / "cli.png"
        rc = main(["render", "--figure", "fig3", "--csv", str(csv_file),
                   "--out", str(out)])
        assert rc == 0 and out.exists()
        assert "peak markers" in capsys.readouterr().out

    def test_missing_column_exit_code(self, tmp_path):
        from figkit.cli import main
        cols = synthetic_columns()
        path = write_csv(tmp_path / "bad.csv", cols, drop=("C",))
        rc = main(["render", "--figure", "fig2", "--csv", str(path),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 2
