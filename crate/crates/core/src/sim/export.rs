//! Text output of trajectories and summaries.

use std::io::Write;

use serde::Serialize;

use super::integrator::Trajectory;
use crate::error::Result;

/// Fixed 17-significant-digit rendering, stable across runs and platforms.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn header(n: usize) -> String {
    let names = ["x", "y", "z"];
    let mut h = String::from("t");
    for i in 0..n {
        h.push(',');
        match names.get(i) {
            Some(s) => h.push_str(s),
            None => h.push_str(&format!("s{i}")),
        }
    }
    h
}

/// CSV with columns `t,x,y[,z]`.
pub fn write_trajectory_csv<const N: usize, W: Write>(w: &mut W, tr: &Trajectory<N>) -> Result<()> {
    writeln!(w, "{}", header(N))?;
    for (t, s) in tr.t.iter().zip(&tr.states) {
        let mut line = fmt17(*t);
        for v in s {
            line.push(',');
            line.push_str(&fmt17(*v));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Whitespace-separated columns for gnuplot, two blank lines between blocks.
pub fn write_trajectory_gnuplot<const N: usize, W: Write>(w: &mut W, blocks: &[Trajectory<N>]) -> Result<()> {
    writeln!(w, "# {}", header(N).replace(',', " "))?;
    for (k, tr) in blocks.iter().enumerate() {
        if k > 0 {
            writeln!(w)?;
            writeln!(w)?;
        }
        for (t, s) in tr.t.iter().zip(&tr.states) {
            let cols: Vec<String> = std::iter::once(*t).chain(s.iter().copied()).map(fmt17).collect();
            writeln!(w, "{}", cols.join(" "))?;
        }
    }
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(w: &mut W, v: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)?;
    Ok(())
}
