//! Generation-based random linear network coding.
//!
//! A frame is cut into blocks of [`BLOCK_SYMBOLS`] one-byte symbols and dealt
//! round-robin over `k` lanes. The `k` blocks sharing a lane position form a
//! generation; each generation is expanded to `n >= k` coded blocks with a
//! random `n x k` coefficient matrix, and any `k` coded blocks whose
//! coefficient rows are independent recover it.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::gf256::{FieldMatrix, Gf256};

/// Symbols per block: the 64 payload bits of a 64b/66b block as 8-bit symbols.
pub const BLOCK_SYMBOLS: usize = 8;

/// Coefficient draws the encoder attempts before giving up.
pub const MAX_REDRAWS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct Block(pub [Gf256; BLOCK_SYMBOLS]);

impl Block {
    pub const ZERO: Self = Self([Gf256::ZERO; BLOCK_SYMBOLS]);

    /// Builds a block from up to eight bytes, zero padding the tail.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut b = Self::ZERO;
        for (dst, &src) in b.0.iter_mut().zip(bytes) {
            *dst = Gf256(src);
        }
        b
    }

    pub fn to_bytes(self) -> [u8; BLOCK_SYMBOLS] {
        self.0.map(Gf256::value)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(std::array::from_fn(|_| Gf256::random(rng)))
    }
}

/// How a frame was laid out over the lanes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FrameLayout {
    pub frame_bytes: usize,
    pub lanes: usize,
    pub blocks_per_frame: usize,
    pub blocks_per_lane: usize,
    /// Zero symbols appended to the final partial block.
    pub padding: usize,
    /// All-zero blocks appended so every lane holds `blocks_per_lane` blocks.
    pub filler_blocks: usize,
}

impl FrameLayout {
    pub fn new(frame_bytes: usize, lanes: usize) -> Result<Self> {
        if frame_bytes == 0 {
            return Err(Error::EmptyFrame);
        }
        if lanes == 0 {
            return Err(invalid("lane count must be at least 1"));
        }
        let blocks_per_frame = frame_bytes.div_ceil(BLOCK_SYMBOLS);
        let blocks_per_lane = blocks_per_frame.div_ceil(lanes);
        Ok(Self {
            frame_bytes,
            lanes,
            blocks_per_frame,
            blocks_per_lane,
            padding: blocks_per_frame * BLOCK_SYMBOLS - frame_bytes,
            filler_blocks: blocks_per_lane * lanes - blocks_per_frame,
        })
    }

    /// Generations needed to carry one frame.
    pub fn generations(&self) -> usize {
        self.blocks_per_lane
    }
}

/// Splits `frame` into `k` lanes of blocks, round-robin.
pub fn split_frame(frame: &[u8], k: usize) -> Result<(Vec<Vec<Block>>, FrameLayout)> {
    let layout = FrameLayout::new(frame.len(), k)?;
    let mut lanes = vec![Vec::with_capacity(layout.blocks_per_lane); k];
    for (i, chunk) in frame.chunks(BLOCK_SYMBOLS).enumerate() {
        lanes[i % k].push(Block::from_bytes(chunk));
    }
    for lane in &mut lanes {
        lane.resize(layout.blocks_per_lane, Block::ZERO);
    }
    Ok((lanes, layout))
}

/// Inverse of [`split_frame`]: interleaves lanes and strips padding.
pub fn join_lanes(lanes: &[Vec<Block>], layout: &FrameLayout) -> Result<Vec<u8>> {
    if lanes.len() != layout.lanes || lanes.iter().any(|l| l.len() != layout.blocks_per_lane) {
        return Err(Error::DimensionMismatch(
            "lane shapes do not match the frame layout".into(),
        ));
    }
    let mut out = Vec::with_capacity(layout.blocks_per_frame * BLOCK_SYMBOLS);
    for i in 0..layout.blocks_per_frame {
        out.extend_from_slice(&lanes[i % layout.lanes][i / layout.lanes].to_bytes());
    }
    out.truncate(layout.frame_bytes);
    Ok(out)
}

/// A coded block on the wire, with its coefficient row carried alongside.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CodedBlock {
    pub generation: u64,
    /// Row of the coefficient matrix this block was produced with.
    pub row: usize,
    pub coefficients: Vec<Gf256>,
    pub payload: Block,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Generation {
    pub index: u64,
    pub source: Vec<Block>,
    /// `n x k` coefficient matrix.
    pub coefficients: FieldMatrix,
    pub coded: Vec<Block>,
}

impl Generation {
    pub fn k(&self) -> usize {
        self.source.len()
    }

    pub fn n(&self) -> usize {
        self.coded.len()
    }

    pub fn coded_block(&self, j: usize) -> CodedBlock {
        CodedBlock {
            generation: self.index,
            row: j,
            coefficients: self.coefficients.row(j).to_vec(),
            payload: self.coded[j],
        }
    }

    pub fn coded_blocks(&self) -> impl Iterator<Item = CodedBlock> + '_ {
        (0..self.n()).map(|j| self.coded_block(j))
    }
}

fn blocks_to_matrix(blocks: &[Block]) -> FieldMatrix {
    let rows: Vec<&[Gf256]> = blocks.iter().map(|b| &b.0[..]).collect();
    FieldMatrix::from_rows(&rows).expect("blocks have uniform length")
}

fn matrix_to_blocks(m: &FieldMatrix) -> Vec<Block> {
    (0..m.rows())
        .map(|r| Block(m.row(r).try_into().expect("row has BLOCK_SYMBOLS entries")))
        .collect()
}

/// Encodes with a caller-supplied `n x k` coefficient matrix.
pub fn encode_with_coefficients(
    index: u64,
    source: Vec<Block>,
    coefficients: FieldMatrix,
) -> Result<Generation> {
    if source.is_empty() {
        return Err(invalid("generation needs at least one source block"));
    }
    if coefficients.cols() != source.len() || coefficients.rows() < source.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} coefficients for {} source blocks",
            coefficients.rows(),
            coefficients.cols(),
            source.len()
        )));
    }
    let coded = matrix_to_blocks(&coefficients.mul(&blocks_to_matrix(&source))?);
    Ok(Generation {
        index,
        source,
        coefficients,
        coded,
    })
}

/// Draws uniform coefficients until the top `k x k` submatrix is invertible,
/// then encodes `source` into `n` coded blocks.
pub fn encode_generation<R: Rng + ?Sized>(
    index: u64,
    source: Vec<Block>,
    n: usize,
    rng: &mut R,
) -> Result<Generation> {
    let k = source.len();
    if k == 0 || n < k {
        return Err(invalid(format!("need n >= k >= 1, got n={n}, k={k}")));
    }
    let top: Vec<usize> = (0..k).collect();
    for _ in 0..MAX_REDRAWS {
        let a = FieldMatrix::random(n, k, rng);
        if a.select_rows(&top).rank() == k {
            return encode_with_coefficients(index, source, a);
        }
    }
    Err(Error::RedrawLimit(MAX_REDRAWS))
}

/// Recovers the `k` source blocks, in lane order, from any received blocks of
/// one generation whose coefficient rows span the full space.
pub fn decode_generation(received: &[CodedBlock], k: usize) -> Result<Vec<Block>> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if let Some(bad) = received.iter().find(|b| b.coefficients.len() != k) {
        return Err(Error::DimensionMismatch(format!(
            "coefficient row of length {} for k={k}",
            bad.coefficients.len()
        )));
    }
    if received.len() < k {
        let rank = if received.is_empty() {
            0
        } else {
            let rows: Vec<&[Gf256]> = received.iter().map(|b| &b.coefficients[..]).collect();
            FieldMatrix::from_rows(&rows)?.rank()
        };
        return Err(Error::UndecodableGeneration { rank, k });
    }
    let rows: Vec<&[Gf256]> = received.iter().map(|b| &b.coefficients[..]).collect();
    let a = FieldMatrix::from_rows(&rows)?;
    let payloads: Vec<Block> = received.iter().map(|b| b.payload).collect();
    match a.solve(&blocks_to_matrix(&payloads)) {
        Ok(x) => Ok(matrix_to_blocks(&x)),
        Err(Error::SingularMatrix { rank, .. }) => Err(Error::UndecodableGeneration { rank, k }),
        Err(e) => Err(e),
    }
}

/// Fraction of uniformly drawn `k x k` matrices (the top rows of an `n x k`
/// draw, without redraw) that are singular.
pub fn decode_failure_probability_estimate<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if k == 0 || n < k {
        return Err(invalid(format!("need n >= k >= 1, got n={n}, k={k}")));
    }
    let top: Vec<usize> = (0..k).collect();
    let singular = (0..trials)
        .filter(|_| FieldMatrix::random(n, k, rng).select_rows(&top).rank() < k)
        .count();
    Ok(singular as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn split_ethernet_frame() {
        let frame = vec![0xA5; 1500];
        let (lanes, layout) = split_frame(&frame, 4).unwrap();
        assert_eq!(layout.blocks_per_frame, 188);
        assert_eq!(layout.blocks_per_lane, 47);
        assert_eq!(layout.filler_blocks, 0);
        assert_eq!(layout.padding, 4);
        assert!(lanes.iter().all(|l| l.len() == 47));
    }

    #[test]
    fn split_small_frames() {
        let (lanes, layout) = split_frame(&[1, 2, 3, 4, 5, 6, 7, 8], 1).unwrap();
        assert_eq!(lanes.len(), 1);
        assert_eq!(lanes[0].len(), 1);
        assert_eq!(layout.padding, 0);

        let (lanes, layout) = split_frame(&[9; 9], 1).unwrap();
        assert_eq!(lanes[0].len(), 2);
        assert_eq!(layout.padding, 7);
        assert_eq!(lanes[0][1], Block::from_bytes(&[9]));

        assert_eq!(split_frame(&[], 3).unwrap_err(), Error::EmptyFrame);
    }

    proptest! {
        #[test]
        fn split_join_round_trip(frame in proptest::collection::vec(any::<u8>(), 1..600), k in 1usize..10) {
            let (lanes, layout) = split_frame(&frame, k).unwrap();
            prop_assert_eq!(join_lanes(&lanes, &layout).unwrap(), frame);
        }
    }

    #[test]
    fn unit_coefficient_is_identity() {
        let src = Block::from_bytes(b"abcdefgh");
        let g = encode_with_coefficients(0, vec![src], FieldMatrix::identity(1)).unwrap();
        assert_eq!(g.coded, vec![src]);
    }

    #[test]
    fn encode_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let src: Vec<Block> = (0..4).map(|_| Block::random(&mut rng)).collect();
        let g = encode_generation(5, src, 6, &mut rng).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.coded.len(), 6);
        assert_eq!(g.coefficients.rows(), 6);
        assert_eq!(g.coefficients.cols(), 4);
        // Each coded symbol is the coefficient row times the source symbols.
        for j in 0..6 {
            for s in 0..BLOCK_SYMBOLS {
                let mut acc = Gf256::ZERO;
                for i in 0..4 {
                    acc += g.coefficients[(j, i)] * g.source[i].0[s];
                }
                assert_eq!(g.coded[j].0[s], acc);
            }
        }
    }

    #[test]
    fn seeded_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let src: Vec<Block> = (0..2).map(|_| Block::random(&mut rng)).collect();
        let g = encode_generation(0, src.clone(), 2, &mut rng).unwrap();
        let rx: Vec<CodedBlock> = g.coded_blocks().collect();
        assert_eq!(decode_generation(&rx, 2).unwrap(), src);
    }

    #[test]
    fn decode_identity_passthrough() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..=8 {
            let src: Vec<Block> = (0..k).map(|_| Block::random(&mut rng)).collect();
            let g = encode_with_coefficients(0, src.clone(), FieldMatrix::identity(k)).unwrap();
            let rx: Vec<CodedBlock> = g.coded_blocks().collect();
            assert_eq!(decode_generation(&rx, k).unwrap(), src);
        }
    }

    #[test]
    fn decode_from_subset_of_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut done = 0;
        while done < 50 {
            let src: Vec<Block> = (0..4).map(|_| Block::random(&mut rng)).collect();
            let g = encode_generation(0, src.clone(), 6, &mut rng).unwrap();
            let rx: Vec<CodedBlock> = [0, 1, 2, 4].iter().map(|&j| g.coded_block(j)).collect();
            match decode_generation(&rx, 4) {
                Ok(out) => {
                    assert_eq!(out, src);
                    done += 1;
                }
                Err(Error::UndecodableGeneration { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn duplicate_rows_are_undecodable() {
        let c = vec![Gf256(7), Gf256(3)];
        let b = CodedBlock {
            generation: 0,
            row: 0,
            coefficients: c,
            payload: Block::ZERO,
        };
        let rx = vec![b.clone(), CodedBlock { row: 1, ..b }];
        assert_eq!(
            decode_generation(&rx, 2),
            Err(Error::UndecodableGeneration { rank: 1, k: 2 })
        );
    }

    #[test]
    fn too_few_blocks_are_undecodable() {
        let b = CodedBlock {
            generation: 0,
            row: 0,
            coefficients: vec![Gf256(1), Gf256(0)],
            payload: Block::ZERO,
        };
        assert_eq!(
            decode_generation(&[b], 2),
            Err(Error::UndecodableGeneration { rank: 1, k: 2 })
        );
    }

    #[test]
    fn redundant_blocks_can_be_discarded() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let src: Vec<Block> = (0..3).map(|_| Block::random(&mut rng)).collect();
        let g = encode_generation(0, src.clone(), 5, &mut rng).unwrap();
        let all: Vec<CodedBlock> = g.coded_blocks().collect();
        assert_eq!(decode_generation(&all, 3).unwrap(), src);
        for drop_a in 0..5 {
            for drop_b in drop_a + 1..5 {
                let rx: Vec<CodedBlock> = all
                    .iter()
                    .filter(|b| b.row != drop_a && b.row != drop_b)
                    .cloned()
                    .collect();
                if let Ok(out) = decode_generation(&rx, 3) {
                    assert_eq!(out, src);
                }
            }
        }
    }

    #[test]
    fn singularity_rate_k1() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let trials = 200_000;
        let est = decode_failure_probability_estimate(1, 1, trials, &mut rng).unwrap();
        let p = 1.0 / 256.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((est - p).abs() <= 3.0 * sigma, "{est} vs {p}");
    }

    #[test]
    fn zero_trials_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(decode_failure_probability_estimate(2, 2, 0, &mut rng).is_err());
    }
}
