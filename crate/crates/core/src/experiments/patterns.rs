//! Beam-pattern tables.

use std::io::Write;

use crate::array::{beam_pattern, AngleGrid};
use crate::codebook::{generate, CodewordId, Method};
use crate::error::{invalid, Result};

/// Floor applied to dB values so that exact nulls stay finite.
pub const DB_FLOOR: f64 = -300.0;

/// How codeword weights are scaled before evaluating `|A(w, ω)|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternScale {
    /// Unit-power codewords as stored.
    UnitPower,
    /// Every active antenna driven at unit amplitude, so the peak grows with
    /// the number of active antennas.
    PerAntenna,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternTable {
    pub omega: Vec<f64>,
    /// `|A(w, ω)|` per requested codeword, in request order.
    pub columns: Vec<(CodewordId, Vec<f64>)>,
}

pub fn to_db(magnitude: f64) -> f64 {
    if magnitude > 0.0 {
        (20.0 * magnitude.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// All codewords of the given layers, in layer then index order.
pub fn layer_codewords(layers: &[usize]) -> Vec<CodewordId> {
    layers
        .iter()
        .flat_map(|&k| (1..=1usize << k).map(move |n| CodewordId::new(k, n)))
        .collect()
}

pub fn run_beam_patterns(
    method: Method,
    n: usize,
    codewords: &[CodewordId],
    grid: &AngleGrid,
    scale: PatternScale,
) -> Result<PatternTable> {
    let cb = generate(method, n)?;
    if codewords.is_empty() {
        return Err(invalid("no codewords requested"));
    }
    let columns = codewords
        .iter()
        .map(|&id| {
            let cw = cb
                .get(id)
                .ok_or_else(|| invalid(format!("{id} does not exist for N = {n}")))?;
            let factor = match scale {
                PatternScale::UnitPower => 1.0,
                PatternScale::PerAntenna => 1.0 / cw.awv().amplitude(),
            };
            let values = beam_pattern(cw.awv(), grid)
                .into_iter()
                .map(|g| g * factor)
                .collect();
            Ok((id, values))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PatternTable {
        omega: grid.points().to_vec(),
        columns,
    })
}

impl PatternTable {
    pub fn column(&self, id: CodewordId) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(c, _)| *c == id)
            .map(|(_, v)| v.as_slice())
    }

    /// Header `omega`, then `w(k,n)` and `w(k,n)_db` for each codeword.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["omega".to_string()];
        for (id, _) in &self.columns {
            header.push(id.to_string());
            header.push(format!("{id}_db"));
        }
        w.write_record(&header)?;
        for (i, omega) in self.omega.iter().enumerate() {
            let mut row = vec![omega.to_string()];
            for (_, values) in &self.columns {
                row.push(values[i].to_string());
                row.push(to_db(values[i]).to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
