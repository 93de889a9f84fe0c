//! Builds the benchmark corpus and prints the XML vs binary size table.

use scenery::binary::{compression_report, decode_binary, encode_binary, EncodeOptions};
use scenery::scenegen::{generate_bench_corpus, GenParams};
use scenery::xml::semantic_equal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_bench_corpus(&GenParams::default())?;
    let mut rows = Vec::new();
    for a in &corpus {
        let bin = encode_binary(&a.scene, EncodeOptions::default())?;
        assert!(semantic_equal(&a.scene, &decode_binary(&bin)?));
        rows.push((a.label.clone(), a.xml_bytes, bin.len() as u64));
    }
    println!("{}", compression_report(&rows)?);

    // without the deflate pass
    let raw = EncodeOptions { compress_payload: false, ..Default::default() };
    let mut rows = Vec::new();
    for a in &corpus {
        rows.push((a.label.clone(), a.xml_bytes, encode_binary(&a.scene, raw)?.len() as u64));
    }
    println!("uncompressed payload:\n{}", compression_report(&rows)?);
    Ok(())
}
