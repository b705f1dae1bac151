//! Blind recovery of hidden text.
//!
//! Every start position in the payload is tried against every candidate
//! length in `[size_down, size_upper]`. A candidate is reported when all of
//! its decoded bytes fall in the accept set.
//!
//! Acceptance is prefix-monotone, so each start decodes bytes only until the
//! first rejected one (or `size_upper`) and then emits every length in range
//! up to that run. This gives the same set as re-extracting each length from
//! scratch.
//!
//! Start positions are split into contiguous chunks claimed in increasing
//! order by the workers. Each worker keeps its own result list; lists are
//! merged by chunk index afterwards, so output order never depends on
//! scheduling.

use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use crate::codec::{decode_byte_unchecked, fits, BitsPerByte, EmbedSpec};
use crate::error::{Error, Result};
use crate::plausibility::{score, AcceptSet};

/// Minimum number of start positions per work chunk.
pub const CHUNK_STARTS: usize = 4096;

#[derive(Clone, Debug)]
pub struct ScanSpec {
    size_down: usize,
    size_upper: usize,
    bits: BitsPerByte,
    stride: usize,
    workers: usize,
    accept: AcceptSet,
}

impl ScanSpec {
    /// Lengths `[size_down, size_upper]` in message bytes, 1-bit, stride 1,
    /// one worker, default accept set.
    pub fn new(size_down: usize, size_upper: usize) -> Result<Self> {
        if size_down == 0 {
            return Err(Error::InvalidParameter(
                "minimum length must be at least 1".into(),
            ));
        }
        if size_upper < size_down {
            return Err(Error::InvalidParameter(format!(
                "maximum length {size_upper} below minimum {size_down}"
            )));
        }
        Ok(ScanSpec {
            size_down,
            size_upper,
            bits: BitsPerByte::One,
            stride: 1,
            workers: 1,
            accept: AcceptSet::default(),
        })
    }

    pub fn with_bits(mut self, bits: BitsPerByte) -> Self {
        self.bits = bits;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        self.stride = stride;
        Ok(self)
    }

    pub fn with_workers(mut self, workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidParameter(
                "worker count must be at least 1".into(),
            ));
        }
        self.workers = workers;
        Ok(self)
    }

    pub fn with_accept(mut self, accept: AcceptSet) -> Self {
        self.accept = accept;
        self
    }

    pub fn size_down(&self) -> usize {
        self.size_down
    }

    pub fn size_upper(&self) -> usize {
        self.size_upper
    }

    pub fn bits(&self) -> BitsPerByte {
        self.bits
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn accept(&self) -> &AcceptSet {
        &self.accept
    }

    /// Layout used to decode at `start`.
    pub fn layout_at(&self, start: usize) -> EmbedSpec {
        EmbedSpec::new(start, self.stride, self.bits).expect("stride validated")
    }

    /// Start positions at which a message of `size_down` bytes fits.
    fn start_range(&self, payload_length: usize) -> Range<usize> {
        let span = (self.size_down * self.bits.slots_per_byte() - 1) * self.stride;
        0..payload_length.saturating_sub(span)
    }
}

/// One plausible hidden string.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub start_position: usize,
    pub length: usize,
    pub text: Vec<u8>,
    pub score: f64,
}

impl Candidate {
    fn new(start_position: usize, text: &[u8]) -> Self {
        Candidate {
            start_position,
            length: text.len(),
            text: text.to_vec(),
            score: score(text).expect("candidates are nonempty"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOutcome {
    /// Sorted by `(start_position, length)`.
    pub candidates: Vec<Candidate>,
    /// More candidates exist than were kept.
    pub truncated: bool,
}

fn scan_starts(payload: &[u8], spec: &ScanSpec, starts: Range<usize>, out: &mut Vec<Candidate>) {
    let per = spec.bits.slots_per_byte();
    let mut run = Vec::with_capacity(spec.size_upper);
    for start in starts {
        let layout = spec.layout_at(start);
        run.clear();
        while run.len() < spec.size_upper && fits(payload.len(), &layout, run.len() + 1) {
            let byte = decode_byte_unchecked(payload, &layout, run.len() * per);
            if !spec.accept.contains(byte) {
                break;
            }
            run.push(byte);
        }
        for length in spec.size_down..=run.len() {
            out.push(Candidate::new(start, &run[..length]));
        }
    }
}

/// Single-threaded scan on the calling thread.
pub fn scan_sequential(payload: &[u8], spec: &ScanSpec) -> Vec<Candidate> {
    let mut out = Vec::new();
    scan_starts(payload, spec, spec.start_range(payload.len()), &mut out);
    out
}

/// Scan with `spec.workers()` workers.
pub fn scan(payload: &[u8], spec: &ScanSpec) -> Vec<Candidate> {
    scan_limited(payload, spec, None).candidates
}

/// Scan keeping at most `max_candidates` results, the first ones in
/// `(start_position, length)` order.
pub fn scan_limited(payload: &[u8], spec: &ScanSpec, max_candidates: Option<usize>) -> ScanOutcome {
    let limit = max_candidates.unwrap_or(usize::MAX);
    let starts = spec.start_range(payload.len());
    let chunk_count = starts.len().div_ceil(CHUNK_STARTS);
    let chunk = |index: usize| {
        let lo = starts.start + index * CHUNK_STARTS;
        lo..(lo + CHUNK_STARTS).min(starts.end)
    };

    // Chunks are claimed in increasing index order and every claimed chunk is
    // finished, so the processed chunks always form a prefix. Claiming stops
    // once that prefix holds more than `limit` candidates, which makes the
    // first `limit` of them the global first `limit`.
    let next = AtomicUsize::new(0);
    let found = AtomicUsize::new(0);
    let work = || {
        let mut local: Vec<(usize, Vec<Candidate>)> = Vec::new();
        while found.load(Ordering::Relaxed) <= limit {
            let index = next.fetch_add(1, Ordering::Relaxed);
            if index >= chunk_count {
                break;
            }
            let mut out = Vec::new();
            scan_starts(payload, spec, chunk(index), &mut out);
            found.fetch_add(out.len(), Ordering::Relaxed);
            local.push((index, out));
        }
        local
    };

    let threads = spec.workers.min(chunk_count).max(1);
    let mut parts = if threads == 1 {
        work()
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..threads).map(|_| s.spawn(work)).collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("scan worker panicked"))
                .collect::<Vec<_>>()
        })
    };
    parts.sort_unstable_by_key(|(index, _)| *index);

    let mut candidates: Vec<Candidate> = parts.into_iter().flat_map(|(_, c)| c).collect();
    let truncated = candidates.len() > limit;
    candidates.truncate(limit);
    ScanOutcome {
        candidates,
        truncated,
    }
}

/// Keeps, per start position, only the longest candidate of each chain of
/// consecutive lengths where every shorter text is a prefix of the next.
/// Input must be sorted by `(start_position, length)`.
pub fn collapse_maximal(candidates: &[Candidate]) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    for c in candidates {
        if let Some(last) = out.last_mut() {
            if last.start_position == c.start_position
                && last.length + 1 == c.length
                && c.text.starts_with(&last.text)
            {
                *last = c.clone();
                continue;
            }
        }
        out.push(c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::embed;

    fn cand(start: usize, text: &str) -> Candidate {
        Candidate::new(start, text.as_bytes())
    }

    #[test]
    fn spec_validation() {
        assert!(ScanSpec::new(0, 5).is_err());
        assert!(ScanSpec::new(6, 5).is_err());
        assert!(ScanSpec::new(5, 5).unwrap().with_workers(0).is_err());
        assert!(ScanSpec::new(5, 5).unwrap().with_stride(0).is_err());
    }

    #[test]
    fn zero_payload_yields_nothing() {
        let spec = ScanSpec::new(10, 10).unwrap().with_workers(3).unwrap();
        assert!(scan(&vec![0u8; 50_000], &spec).is_empty());
        assert!(scan_sequential(&[], &spec).is_empty());
        assert!(scan(&[], &spec).is_empty());
    }

    #[test]
    fn too_small_payload_yields_nothing() {
        let spec = ScanSpec::new(2, 4).unwrap();
        let mut payload = vec![0u8; 15];
        // would need 16 slots
        assert!(scan(&payload, &spec).is_empty());
        payload.push(0);
        embed(&mut payload, b"hi", &spec.layout_at(0)).unwrap();
        assert_eq!(scan(&payload, &spec), vec![cand(0, "hi")]);
    }

    #[test]
    fn prefixes_are_emitted() {
        let spec = ScanSpec::new(2, 4).unwrap();
        let mut payload = vec![0u8; 64];
        embed(&mut payload, b"abc", &spec.layout_at(0)).unwrap();
        let at_zero: Vec<_> = scan(&payload, &spec)
            .into_iter()
            .filter(|c| c.start_position == 0)
            .collect();
        assert_eq!(at_zero, vec![cand(0, "ab"), cand(0, "abc")]);
    }

    #[test]
    fn stride_and_two_bit_layouts() {
        for bits in [BitsPerByte::One, BitsPerByte::Two] {
            let spec = ScanSpec::new(4, 4)
                .unwrap()
                .with_bits(bits)
                .with_stride(3)
                .unwrap();
            let mut payload = vec![0u8; 200];
            embed(&mut payload, b"Rust", &spec.layout_at(17)).unwrap();
            let found = scan(&payload, &spec);
            assert!(found.contains(&cand(17, "Rust")), "{bits:?}");
        }
    }

    #[test]
    fn truncation_keeps_leading_candidates() {
        // every byte accepted: candidates at every start
        let spec = ScanSpec::new(1, 2)
            .unwrap()
            .with_accept(AcceptSet::from_predicate(|_| true));
        let payload: Vec<u8> = (0..20_000u32).map(|i| (i * 7 % 251) as u8).collect();
        let full = scan(&payload, &spec);
        for workers in [1, 2, 5] {
            let spec = spec.clone().with_workers(workers).unwrap();
            let limited = scan_limited(&payload, &spec, Some(1000));
            assert!(limited.truncated);
            assert_eq!(limited.candidates, full[..1000]);
            let exact = scan_limited(&payload, &spec, Some(full.len()));
            assert!(!exact.truncated);
            assert_eq!(exact.candidates, full);
        }
    }

    #[test]
    fn collapse_examples() {
        let input = vec![cand(5, "HelloWorld"), cand(5, "HelloWorld!")];
        assert_eq!(collapse_maximal(&input), vec![cand(5, "HelloWorld!")]);
        assert!(collapse_maximal(&[]).is_empty());
        let distinct = vec![cand(1, "ab"), cand(2, "abc")];
        assert_eq!(collapse_maximal(&distinct), distinct);
        let gap = vec![cand(1, "ab"), cand(1, "abcd")];
        assert_eq!(collapse_maximal(&gap), gap);
    }
}
