use std::io::Write;

use serde::Serialize;

/// Per-sentence grounding counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SentenceStats {
    #[serde(rename = "sentence-id")]
    pub sentence_id: usize,
    pub strategy: String,
    /// Guards summed over all block plans built.
    pub guards: usize,
    /// Non-vacuous splits summed over all block plans built.
    #[serde(rename = "splits-kept")]
    pub splits_kept: usize,
    /// Largest satisfying-set tensor, in bits.
    #[serde(rename = "tensor-bits")]
    pub tensor_bits: u64,
    /// Residual instantiations grounded.
    pub instantiations: u64,
    pub micros: u128,
}

pub fn write_stats_csv<W: Write>(stats: &[SentenceStats], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if stats.is_empty() {
        w.write_record([
            "sentence-id",
            "strategy",
            "guards",
            "splits-kept",
            "tensor-bits",
            "instantiations",
            "micros",
        ])?;
    }
    for s in stats {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_row() {
        let mut buf = Vec::new();
        write_stats_csv(
            &[SentenceStats {
                strategy: "vec".into(),
                guards: 1,
                ..Default::default()
            }],
            &mut buf,
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sentence-id,strategy,guards,splits-kept,tensor-bits,instantiations,micros\n0,vec,1,0,0,0,0\n"
        );
    }
}
