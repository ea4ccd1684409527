use std::io::{Read, Write};

use super::{MeasuredField, RearrangedProfile};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scientific notation with enough digits to round-trip `T`.
pub fn fmt_sci<T: Scalar>(v: T) -> String {
    if T::epsilon() < T::lit(1e-10) {
        format!("{v:.16e}")
    } else {
        format!("{v:.8e}")
    }
}

/// Writes `measure,value` rows.
pub fn write_field_csv<T: Scalar>(out: impl Write, field: &MeasuredField<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["measure", "value"])?;
    for (m, v) in field.cells() {
        w.write_record([fmt_sci(m), fmt_sci(v)])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

/// Reads a `measure,value` CSV.
pub fn read_field_csv<T: Scalar>(input: impl Read) -> Result<MeasuredField<T>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "measure" || &headers[1] != "value" {
        return Err(Error::Csv(format!("expected header `measure,value`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut cells = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<T> {
            rec[k]
                .trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|e| Error::Csv(format!("row {}: {e}", line + 1)))
        };
        cells.push((parse(0)?, parse(1)?));
    }
    MeasuredField::from_cells(cells)
}

/// Writes `y_break,level` rows: each segment's right breakpoint and level.
pub fn write_profile_csv<T: Scalar>(out: impl Write, p: &RearrangedProfile<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y_break", "level"])?;
    for (y, v) in p.breakpoints()[1..].iter().zip(p.levels()) {
        w.write_record([fmt_sci(*y), fmt_sci(*v)])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}
