//! CSV formatting: comma separated, LF endings, 12 significant digits.

use std::io::{self, Write};

use qd_cascade::observables::IntensityUnit;
use qd_cascade::Record;

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "nan".to_string()
    }
}

pub fn write_row<W: Write + ?Sized>(w: &mut W, cells: &[String]) -> io::Result<()> {
    writeln!(w, "{}", cells.join(","))
}

pub fn write_header<W: Write + ?Sized>(w: &mut W, names: &[&str]) -> io::Result<()> {
    writeln!(w, "{}", names.join(","))
}

pub fn write_comment<W: Write + ?Sized>(w: &mut W, text: &str) -> io::Result<()> {
    writeln!(w, "# {text}")
}

/// Observable columns shared by steady and evolve output.
pub const RECORD_COLUMNS: [&str; 14] = [
    "pop_1",
    "pop_2",
    "pop_3",
    "pop_w",
    "pop_u",
    "pop_b",
    "pop_d",
    "re_rho13",
    "im_rho13",
    "purity",
    "variance_phi",
    "g2",
    "inversion_one",
    "inversion_two",
];

pub fn record_cells(r: &Record) -> Vec<String> {
    let [p1, p2, p3] = r.populations_bare;
    let [pw, pu, _] = r.populations_super;
    let [pb, pd] = r.populations_brightdark.unwrap_or([f64::NAN; 2]);
    [
        p1,
        p2,
        p3,
        pw,
        pu,
        pb,
        pd,
        r.coherence13.re,
        r.coherence13.im,
        r.purity,
        r.variance_phi,
        if r.g2.no_excited_population { f64::NAN } else { r.g2.value },
        r.inversion_one,
        r.inversion_two,
    ]
    .map(num)
    .to_vec()
}

/// `ok`, or `no_excitation` when g² is undefined.
pub fn record_status(r: &Record) -> &'static str {
    if r.g2.no_excited_population {
        "no_excitation"
    } else {
        "ok"
    }
}

pub fn unit_name(unit: IntensityUnit) -> &'static str {
    match unit {
        IntensityUnit::Gamma => "Gamma",
        IntensityUnit::Gamma0 => "gamma0",
    }
}

/// Row of `nan` observables with an error status.
pub fn error_cells(columns: usize, status: &str) -> Vec<String> {
    let mut cells = vec!["nan".to_string(); columns];
    cells.push(status.to_string());
    cells
}

/// Short, comma-free status for a failed point.
pub fn error_status(e: &qd_cascade::Error) -> String {
    use qd_cascade::Error;
    match e {
        Error::DegenerateSteadyState { null_dim } => format!("error_degenerate_null_dim_{null_dim}"),
        Error::SteadyStateResidual { .. } => "error_residual".into(),
        Error::InvalidParameters(_) | Error::DegenerateParameters(_) | Error::DivisionByZero(_) => {
            "error_parameters".into()
        }
        Error::InvalidRegime(_) => "error_regime".into(),
        _ => "error_numerical".into(),
    }
}
