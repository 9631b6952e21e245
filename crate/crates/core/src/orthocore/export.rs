use std::io::Write;

use super::table::OrthoTable;
use crate::error::{Error, Result};
use crate::mp::format_float;

/// CSV with a `#` metadata line, a header, and rows `n = 0..=n_max`.
pub fn write_table_csv<W: Write>(table: &OrthoTable, out: W) -> Result<()> {
    let digits = table.meta().agreement_digits as usize + 5;
    let io = |e: std::io::Error| Error::InvalidInput(format!("write failed: {e}"));
    let mut out = out;
    writeln!(
        out,
        "# alpha={},t={},mantissa_bits={}",
        table.params().alpha(),
        table.params().t(),
        table.prec()
    )
    .map_err(io)?;
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("write failed: {e}"));
    writer
        .write_record(["n", "h_n", "beta_n", "p_n", "logD_n"])
        .map_err(csv_err)?;
    for n in 0..=table.n_max() {
        writer
            .write_record([
                n.to_string(),
                format_float(table.h(n), digits),
                format_float(table.beta(n), digits),
                format_float(table.p(n), digits),
                format_float(table.log_d(n), digits),
            ])
            .map_err(csv_err)?;
    }
    writer.flush().map_err(io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthocore::build_ortho_table;
    use crate::{PrecisionContext, WeightParams};

    #[test]
    fn csv_layout() {
        let params = WeightParams::new(0.5, 1.0).unwrap();
        let table = build_ortho_table(params, 4, &PrecisionContext::for_table(4, 20)).unwrap();
        let mut buf = Vec::new();
        write_table_csv(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# alpha=0.5,t=1,mantissa_bits="));
        assert_eq!(lines[1], "n,h_n,beta_n,p_n,logD_n");
        assert_eq!(lines.len(), 2 + 5);
        assert!(lines[2].starts_with("0,"));
    }
}
