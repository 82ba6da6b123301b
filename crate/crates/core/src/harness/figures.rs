use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::coord::ranged1d::{AsRangedCoord, ValueFormatter};
use plotters::prelude::*;

use super::config::Mode;
use super::ensemble::MetricsRow;
use crate::error::{Error, Result};

const SIZE: (u32, u32) = (720, 480);
/// Floor for values drawn on a logarithmic axis.
const LOG_FLOOR: f64 = 1e-5;

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    dashed: bool,
}

fn palette(i: usize) -> RGBColor {
    const COLORS: [RGBColor; 6] = [
        RGBColor(31, 119, 180),
        RGBColor(214, 39, 40),
        RGBColor(44, 160, 44),
        RGBColor(148, 103, 189),
        RGBColor(255, 127, 14),
        RGBColor(23, 190, 207),
    ];
    COLORS[i % COLORS.len()]
}

fn draw_err<E: std::error::Error + Send + Sync>(path: &Path, e: DrawingAreaErrorKind<E>) -> Error {
    Error::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn render<Y>(path: &Path, title: &str, y_desc: &str, series: &[Series], y_range: Y) -> Result<()>
where
    Y: AsRangedCoord<Value = f64>,
    Y::CoordDescType: ValueFormatter<f64>,
{
    let x_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    let e = |err| draw_err(path, err);
    root.fill(&WHITE).map_err(e)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..x_max, y_range)
        .map_err(e)?;
    chart
        .configure_mesh()
        .x_desc("alpha = P/N")
        .y_desc(y_desc)
        .draw()
        .map_err(e)?;
    for (i, s) in series.iter().enumerate() {
        let color = if s.dashed { BLACK } else { palette(i) };
        let style = ShapeStyle::from(&color).stroke_width(2);
        let anno = if s.dashed {
            chart
                .draw_series(DashedLineSeries::new(s.points.iter().copied(), 6, 4, style))
                .map_err(e)?
        } else {
            chart
                .draw_series(LineSeries::new(s.points.iter().copied(), style))
                .map_err(e)?
        };
        anno.label(s.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .position(SeriesLabelPosition::UpperRight)
        .draw()
        .map_err(e)?;
    root.present().map_err(e)?;
    Ok(())
}

fn linear(path: &Path, title: &str, y_desc: &str, series: &[Series]) -> Result<()> {
    let hi = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0f64, f64::max);
    let hi = if hi > 0.0 { hi * 1.05 } else { 1.0 };
    render(path, title, y_desc, series, 0.0..hi)
}

fn semilog(path: &Path, title: &str, y_desc: &str, series: &[Series]) -> Result<()> {
    let clipped: Vec<Series> = series
        .iter()
        .map(|s| Series {
            label: s.label.clone(),
            points: s
                .points
                .iter()
                .map(|&(x, y)| (x, y.max(LOG_FLOOR)))
                .collect(),
            dashed: s.dashed,
        })
        .collect();
    let hi = clipped
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(LOG_FLOOR * 10.0, f64::max);
    render(
        path,
        title,
        y_desc,
        &clipped,
        (LOG_FLOOR..hi * 1.5).log_scale(),
    )
}

fn column(rows: &[&MetricsRow], f: impl Fn(&MetricsRow) -> Option<f64>) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|r| f(r).map(|v| (r.alpha, v)))
        .collect()
}

fn series(label: impl Into<String>, points: Vec<(f64, f64)>) -> Series {
    Series {
        label: label.into(),
        points,
        dashed: false,
    }
}

/// Writes SVG figures for `rows` into `out_dir` and returns the paths.
///
/// Per `(mode, N)`: `fig_error`, `fig_error_log` and `fig_success`; with
/// entropy data also `fig_entropy` (against `1 - alpha`) and
/// `fig_generalization`. When a mode has several sizes, `fig_success_sizes`
/// and `fig_error_log_sizes` overlay them (`n` part lists the sizes); when a
/// size has several modes, `fig_success_modes` overlays those (mode part `all`).
pub fn emit_figures(rows: &[MetricsRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::Output {
            path: out_dir.to_path_buf(),
            message: "no rows to plot".into(),
        });
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut groups: BTreeMap<(&str, usize), Vec<&MetricsRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.mode.name(), r.n)).or_default().push(r);
    }
    for g in groups.values_mut() {
        g.sort_by_key(|r| r.p);
    }

    let mut written = Vec::new();
    let mut emit =
        |name: &str, mode: &str, n: &str, log: bool, title: String, y: &str, s: Vec<Series>| {
            let path = out_dir.join(format!("fig_{name}_{mode}_n{n}.svg"));
            if log {
                semilog(&path, &title, y, &s)?;
            } else {
                linear(&path, &title, y, &s)?;
            }
            written.push(path);
            Ok::<_, Error>(())
        };

    for (&(mode, n), g) in &groups {
        let ns = n.to_string();
        let err = column(g, |r| Some(r.mean_error));
        let succ = column(g, |r| Some(r.success_fraction));
        emit(
            "error",
            mode,
            &ns,
            false,
            format!("{mode}, N = {n}"),
            "mean error",
            vec![series("error", err.clone())],
        )?;
        emit(
            "error_log",
            mode,
            &ns,
            true,
            format!("{mode}, N = {n}"),
            "mean error",
            vec![series("error", err)],
        )?;
        emit(
            "success",
            mode,
            &ns,
            false,
            format!("{mode}, N = {n}"),
            "success fraction",
            vec![series("success", succ)],
        )?;

        let entropy = column(g, |r| r.entropy_density);
        if !entropy.is_empty() {
            let reference: Vec<(f64, f64)> = entropy
                .iter()
                .map(|&(a, _)| (a, (1.0 - a).max(0.0)))
                .collect();
            let s = vec![
                series("entropy density", entropy),
                Series {
                    label: "1 - alpha".into(),
                    points: reference,
                    dashed: true,
                },
            ];
            emit(
                "entropy",
                mode,
                &ns,
                false,
                format!("{mode}, N = {n}"),
                "bits per weight",
                s,
            )?;
        }
        let gen = column(g, |r| r.gen_error);
        if !gen.is_empty() {
            emit(
                "generalization",
                mode,
                &ns,
                false,
                format!("{mode}, N = {n}"),
                "generalization error",
                vec![series("generalization", gen)],
            )?;
        }
    }

    let mut by_mode: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut by_n: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for &(mode, n) in groups.keys() {
        by_mode.entry(mode).or_default().push(n);
        by_n.entry(n).or_default().push(mode);
    }
    for (mode, sizes) in by_mode.iter().filter(|(_, s)| s.len() > 1) {
        let tag = sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join("-");
        let pick = |f: fn(&MetricsRow) -> Option<f64>| -> Vec<Series> {
            sizes
                .iter()
                .map(|&n| series(format!("N = {n}"), column(&groups[&(*mode, n)], f)))
                .collect()
        };
        emit(
            "success_sizes",
            mode,
            &tag,
            false,
            mode.to_string(),
            "success fraction",
            pick(|r| Some(r.success_fraction)),
        )?;
        emit(
            "error_log_sizes",
            mode,
            &tag,
            true,
            mode.to_string(),
            "mean error",
            pick(|r| Some(r.mean_error)),
        )?;
    }
    for (n, modes) in by_n.iter().filter(|(_, m)| m.len() > 1) {
        let s = modes
            .iter()
            .map(|&m| series(m, column(&groups[&(m, *n)], |r| Some(r.success_fraction))))
            .collect();
        emit(
            "success_modes",
            "all",
            &n.to_string(),
            false,
            format!("N = {n}"),
            "success fraction",
            s,
        )?;
    }
    Ok(written)
}

/// Modes present in `rows`, in canonical order.
pub fn modes_in(rows: &[MetricsRow]) -> Vec<Mode> {
    Mode::ALL
        .into_iter()
        .filter(|m| rows.iter().any(|r| r.mode == *m))
        .collect()
}
