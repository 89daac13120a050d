//! `veccause simulate`: one synthetic model, sampled to CSV.

use serde::Serialize;
use veccause::synth::{sample_model_seeded, LinearGroupModel, ModelParams};
use veccause::DataMatrix;

use crate::error::CliError;

/// Ground truth written next to the samples.
#[derive(Debug, Serialize)]
pub struct Sidecar<'a> {
    pub params: &'a ModelParams,
    pub model: &'a LinearGroupModel,
}

pub fn simulate(params: &ModelParams) -> Result<(LinearGroupModel, DataMatrix), CliError> {
    sample_model_seeded(params).map_err(|e| CliError::input(e.to_string()))
}

/// Header row, then one line per sample in shortest round-trip notation.
pub fn to_csv(data: &DataMatrix) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::io(e.to_string());
    w.write_record(data.column_names()).map_err(err)?;
    let values = data.values();
    let mut row = Vec::with_capacity(values.ncols());
    for r in 0..values.nrows() {
        row.clear();
        row.extend(values.row(r).iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::io(e.to_string()))
}
