use rand::Rng;
use serde::Serialize;

use super::{inject_packet_loss, inject_path_failures, select_paths, Scenario};
use crate::codec::{
    decode_generation, encode_generation, join_lanes, split_frame, Block, CodedBlock, FrameLayout,
};
use crate::error::Result;

/// What one replication delivered. `delivery` is `None` when the request
/// was blocked because too few paths could be set up.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct ReplicationResult {
    pub delivery: Option<Delivery>,
}

impl ReplicationResult {
    pub fn blocked(&self) -> bool {
        self.delivery.is_none()
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Delivery {
    /// Paths left after blocking and path failures.
    pub available: usize,
    /// Chosen paths as indices into the scenario delay vector, ascending.
    pub chosen: Vec<usize>,
    pub chosen_delays: Vec<u64>,
    /// Largest gap between the first and the `k`-th block arrival of a
    /// generation. `None` if no generation received `k` blocks.
    pub diff_delay: Option<u64>,
    /// Whether `diff_delay` equals the largest differential delay possible
    /// on the scenario delay vector.
    pub hit_tau_up: bool,
    /// Peak deskew storage, `k` times the fullest lane FIFO. Measured only
    /// without redundancy.
    pub deskew_peak: Option<u64>,
    /// Peak VOQ occupancy. Coded methods only.
    pub decoding_peak: Option<u64>,
    /// Mean VOQ occupancy once every lane is delivering.
    pub decoding_steady_mean: Option<f64>,
    pub generations: usize,
    /// Generations never recovered.
    pub decode_failures: usize,
    /// Generations whose first `k` blocks did not span the space and had to
    /// wait for further blocks.
    pub stalls: usize,
    /// Blocks dropped because their VOQ was still held by an older
    /// generation.
    pub voq_conflicts: usize,
    /// Every frame was reassembled byte for byte.
    pub frame_intact: bool,
}

#[derive(Default)]
struct GenState {
    arrivals: usize,
    first_arrival: Option<u64>,
    kth_arrival: Option<u64>,
    voq: Vec<CodedBlock>,
    retry: Option<Vec<CodedBlock>>,
    decoded: Option<Vec<Block>>,
    lanes_in: usize,
}

/// Runs one replication of `s` (assumed valid) with its own random source.
pub fn run_replication<R: Rng + ?Sized>(s: &Scenario, rng: &mut R) -> Result<ReplicationResult> {
    let (k, r, n) = (s.k, s.r, s.n());
    let all = s.delays.as_slice();

    let mut available = s.draw_available(rng);
    if s.failures.paths > 0 {
        inject_path_failures(&mut available, s.failures.paths, rng);
    }
    if available.len() < n {
        return Ok(ReplicationResult { delivery: None });
    }
    let avail_delays: Vec<u64> = available.iter().map(|&i| all[i]).collect();
    let set = select_paths(&avail_delays, k, r, s.method, rng)?;
    let chosen: Vec<usize> = set.members.iter().map(|&i| available[i]).collect();
    let delays = set.delays(&avail_delays);

    // Source data.
    let layout = FrameLayout::new(s.frame_bytes, k)?;
    let per_frame = layout.generations();
    let total = per_frame * s.frames_per_replication;
    let mut frames = Vec::with_capacity(s.frames_per_replication);
    let mut sources: Vec<Vec<Block>> = Vec::with_capacity(total);
    for _ in 0..s.frames_per_replication {
        let mut bytes = vec![0u8; s.frame_bytes];
        rng.fill(&mut bytes[..]);
        let (lanes, _) = split_frame(&bytes, k)?;
        for g in 0..per_frame {
            sources.push(lanes.iter().map(|lane| lane[g]).collect());
        }
        frames.push(bytes);
    }

    // What goes on the wire: coded blocks, or the source blocks themselves.
    let coded = s.method.is_coded();
    let mut wire: Vec<Vec<CodedBlock>> = Vec::with_capacity(total);
    for (g, src) in sources.iter().enumerate() {
        if coded {
            let generation = encode_generation(g as u64, src.clone(), n, rng)?;
            wire.push(generation.coded_blocks().collect());
        } else {
            wire.push(
                src.iter()
                    .enumerate()
                    .map(|(j, b)| CodedBlock {
                        generation: g as u64,
                        row: j,
                        coefficients: Vec::new(),
                        payload: *b,
                    })
                    .collect(),
            );
        }
    }
    let lost: Vec<Vec<bool>> = (0..total)
        .map(|_| {
            if s.failures.packets > 0 {
                inject_packet_loss(n, s.failures.packets, rng)
            } else {
                vec![false; n]
            }
        })
        .collect();

    let d_min = delays[0];
    let d_max = delays[n - 1];
    let measure_deskew = r == 0;
    let mut gens: Vec<GenState> = (0..total).map(|_| GenState::default()).collect();
    let mut voq_owner: Vec<Option<usize>> = vec![None; s.voq_limit.unwrap_or(0)];
    let mut lane_fill = vec![0u64; n];
    let mut lane_peak = 0u64;
    let mut occupancy = 0u64;
    let mut peak = 0u64;
    let mut steady_sum = 0u64;
    let mut steady_len = 0u64;
    let mut stalls = 0usize;
    let mut conflicts = 0usize;
    let mut complete_now: Vec<usize> = Vec::new();
    let mut deskew_ready: Vec<usize> = Vec::new();

    let horizon = (total as u64 - 1) + d_max;
    for t in 0..=horizon {
        complete_now.clear();
        deskew_ready.clear();
        for (j, &d) in delays.iter().enumerate() {
            if t < d || t - d >= total as u64 {
                continue;
            }
            let g = (t - d) as usize;
            let st = &mut gens[g];

            if measure_deskew {
                lane_fill[j] += 1;
                st.lanes_in += 1;
                if st.lanes_in == k {
                    deskew_ready.push(g);
                }
            }
            if lost[g][j] {
                continue;
            }
            st.arrivals += 1;
            st.first_arrival.get_or_insert(t);
            if st.arrivals == k {
                st.kth_arrival = Some(t);
            }
            let block = wire[g][j].clone();

            if !coded {
                st.voq.push(block);
                continue;
            }
            if st.decoded.is_some() || st.voq.len() == k {
                continue;
            }
            if let Some(pending) = st.retry.as_mut() {
                pending.push(block);
                if let Ok(out) = decode_generation(pending, k) {
                    st.decoded = Some(out);
                    st.retry = None;
                }
                continue;
            }
            if st.voq.is_empty() && !voq_owner.is_empty() {
                let q = g % voq_owner.len();
                match voq_owner[q] {
                    Some(other) if other != g => {
                        conflicts += 1;
                        continue;
                    }
                    _ => voq_owner[q] = Some(g),
                }
            }
            st.voq.push(block);
            occupancy += 1;
            if st.voq.len() == k {
                complete_now.push(g);
            }
        }

        if coded {
            peak = peak.max(occupancy);
            if t >= d_max && t <= (total as u64 - 1) + d_min {
                steady_sum += occupancy;
                steady_len += 1;
            }
        }
        if measure_deskew {
            lane_peak = lane_peak.max(lane_fill.iter().copied().max().unwrap_or(0));
        }

        for &g in &complete_now {
            let st = &mut gens[g];
            let received = std::mem::take(&mut st.voq);
            occupancy -= received.len() as u64;
            if !voq_owner.is_empty() {
                let q = g % voq_owner.len();
                voq_owner[q] = None;
            }
            match decode_generation(&received, k) {
                Ok(out) => st.decoded = Some(out),
                Err(_) => {
                    stalls += 1;
                    st.retry = Some(received);
                }
            }
        }
        for &g in &deskew_ready {
            for fill in lane_fill.iter_mut() {
                *fill -= 1;
            }
            if !coded && gens[g].voq.len() == k {
                let mut blocks = std::mem::take(&mut gens[g].voq);
                blocks.sort_by_key(|b| b.row);
                gens[g].decoded = Some(blocks.into_iter().map(|b| b.payload).collect());
            }
        }
    }

    let decode_failures = gens.iter().filter(|g| g.decoded.is_none()).count();
    let frame_intact = decode_failures == 0 && frames_match(&frames, &gens, &layout, k)?;
    let diff_delay = gens
        .iter()
        .filter_map(|g| Some(g.kth_arrival? - g.first_arrival?))
        .max();
    let tau_up = s.delays.tau_up(r)?;

    Ok(ReplicationResult {
        delivery: Some(Delivery {
            available: available.len(),
            chosen,
            chosen_delays: delays,
            diff_delay,
            hit_tau_up: diff_delay == Some(tau_up),
            deskew_peak: measure_deskew.then_some(k as u64 * lane_peak),
            decoding_peak: coded.then_some(peak),
            decoding_steady_mean: (coded && steady_len > 0)
                .then(|| steady_sum as f64 / steady_len as f64),
            generations: total,
            decode_failures,
            stalls,
            voq_conflicts: conflicts,
            frame_intact,
        }),
    })
}

fn frames_match(frames: &[Vec<u8>], gens: &[GenState], layout: &FrameLayout, k: usize) -> Result<bool> {
    let per_frame = layout.generations();
    for (f, bytes) in frames.iter().enumerate() {
        let mut lanes = vec![Vec::with_capacity(per_frame); k];
        for st in &gens[f * per_frame..(f + 1) * per_frame] {
            let out = st.decoded.as_ref().expect("checked by caller");
            for (lane, b) in lanes.iter_mut().zip(out) {
                lane.push(*b);
            }
        }
        if join_lanes(&lanes, layout)? != *bytes {
            return Ok(false);
        }
    }
    Ok(true)
}
