#![no_main]

use lanecode::codec::{decode_generation, Block, CodedBlock, BLOCK_SYMBOLS};
use lanecode::{FieldMatrix, Gf256};
use libfuzzer_sys::fuzz_target;

// Layout: k, block count, k source blocks, then k coefficient bytes and a
// raw payload per received block.
fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let k = usize::from(data[0] % 8) + 1;
    let count = usize::from(data[1] % 13);
    let Some(rest) = data.get(2 + k * BLOCK_SYMBOLS..) else {
        return;
    };
    let source: Vec<Block> = data[2..2 + k * BLOCK_SYMBOLS]
        .chunks(BLOCK_SYMBOLS)
        .map(Block::from_bytes)
        .collect();
    let mut raw = Vec::new();
    let mut consistent = Vec::new();
    for (row, chunk) in rest.chunks_exact(k + BLOCK_SYMBOLS).take(count).enumerate() {
        let coefficients: Vec<Gf256> = chunk[..k].iter().map(|&c| Gf256(c)).collect();
        let mut payload = Block::ZERO;
        for s in 0..BLOCK_SYMBOLS {
            for (c, x) in coefficients.iter().zip(&source) {
                payload.0[s] += *c * x.0[s];
            }
        }
        raw.push(CodedBlock {
            generation: 0,
            row,
            coefficients: coefficients.clone(),
            payload: Block::from_bytes(&chunk[k..]),
        });
        consistent.push(CodedBlock {
            generation: 0,
            row,
            coefficients,
            payload,
        });
    }
    // Arbitrary payloads must never panic the decoder.
    let _ = decode_generation(&raw, k);

    let full = !consistent.is_empty() && {
        let rows: Vec<&[Gf256]> = consistent.iter().map(|b| &b.coefficients[..]).collect();
        FieldMatrix::from_rows(&rows).unwrap().rank() == k
    };
    match decode_generation(&consistent, k) {
        Ok(out) => {
            assert!(full);
            assert_eq!(out, source);
        }
        Err(_) => assert!(!full),
    }
});
