//! CSV rows and plot data.

use chaoslab_core::harness::BoundReport;

pub const CSV_HEADER: [&str; 15] = [
    "theorem_id",
    "family",
    "E_size",
    "V_size",
    "t",
    "gamma1",
    "gamma2",
    "k",
    "n_disorder",
    "engine",
    "lhs",
    "lhs_stderr",
    "rhs",
    "slack",
    "verdict",
];

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn csv_record(r: &BoundReport) -> Vec<String> {
    vec![
        r.theorem_id.to_string(),
        r.family.to_string(),
        opt(r.e_size),
        opt(r.v_size),
        opt_f(r.t),
        opt_f(r.gamma1),
        opt_f(r.gamma2),
        opt(r.k),
        r.n_disorder.to_string(),
        r.engine.clone(),
        fmt_f64(r.lhs),
        fmt_f64(r.lhs_stderr),
        fmt_f64(r.rhs),
        fmt_f64(r.slack),
        r.verdict.to_string(),
    ]
}

/// Sweep variables that can go on the x axis of a plot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotAxis {
    T,
    Gamma1,
    Gamma2,
    ESize,
    VSize,
    K,
}

impl PlotAxis {
    pub const ALL: [PlotAxis; 6] =
        [PlotAxis::T, PlotAxis::Gamma1, PlotAxis::Gamma2, PlotAxis::ESize, PlotAxis::VSize, PlotAxis::K];

    pub fn name(self) -> &'static str {
        match self {
            PlotAxis::T => "t",
            PlotAxis::Gamma1 => "gamma1",
            PlotAxis::Gamma2 => "gamma2",
            PlotAxis::ESize => "E_size",
            PlotAxis::VSize => "V_size",
            PlotAxis::K => "k",
        }
    }

    pub fn value(self, r: &BoundReport) -> Option<f64> {
        match self {
            PlotAxis::T => r.t,
            PlotAxis::Gamma1 => r.gamma1,
            PlotAxis::Gamma2 => r.gamma2,
            PlotAxis::ESize => r.e_size.map(|e| e as f64),
            PlotAxis::VSize => r.v_size.map(|v| v as f64),
            PlotAxis::K => r.k.map(|k| k as f64),
        }
    }
}

/// Two-column `x y` text for one axis, with blank lines between runs where
/// some other sweep variable changed (gnuplot data blocks).
pub fn plot_data(rows: &[BoundReport], axis: PlotAxis, y: impl Fn(&BoundReport) -> f64) -> String {
    let others: Vec<PlotAxis> = PlotAxis::ALL.into_iter().filter(|a| *a != axis).collect();
    let key = |r: &BoundReport| others.iter().map(|a| a.value(r).map(f64::to_bits)).collect::<Vec<_>>();
    let mut out = format!("# {} y\n", axis.name());
    let mut last = None;
    for r in rows {
        let Some(x) = axis.value(r) else { continue };
        let k = key(r);
        if last.as_ref().is_some_and(|l| *l != k) {
            out.push('\n');
        }
        out.push_str(&format!("{} {}\n", fmt_f64(x), fmt_f64(y(r))));
        last = Some(k);
    }
    out
}

/// Axes along which `rows` take more than one value.
pub fn varying_axes(rows: &[BoundReport]) -> Vec<PlotAxis> {
    PlotAxis::ALL
        .into_iter()
        .filter(|a| {
            let mut vals: Vec<u64> = rows.iter().filter_map(|r| a.value(r)).map(f64::to_bits).collect();
            vals.sort_unstable();
            vals.dedup();
            vals.len() > 1
        })
        .collect()
}
