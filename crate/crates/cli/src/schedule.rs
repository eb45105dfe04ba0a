use sfett_core::SfEttRank;

/// Rank schedule for approximation sweeps: start at all ones, then
/// alternately raise every Tucker rank (shared included) and every TT rank
/// by one. Each point is clamped to what `dims` admits; points that clamp to
/// the previous one are kept so the schedule length is always `points`.
pub fn rank_schedule(dims: &[usize], d_t: usize, points: usize) -> Vec<SfEttRank> {
    let d = dims.len();
    let (mut tt, mut tk) = (1, 1);
    let mut out = Vec::with_capacity(points);
    for p in 0..points {
        if p > 0 {
            if p % 2 == 1 {
                tk += 1;
            } else {
                tt += 1;
            }
        }
        let r = SfEttRank::new(vec![tt; d - 1], vec![tk; d_t], tk);
        out.push(r.clamped(dims, d_t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternates() {
        let s = rank_schedule(&[6, 6, 6], 1, 4);
        let flat: Vec<(usize, usize, usize)> = s.iter().map(|r| (r.tt[0], r.tucker[0], r.shared)).collect();
        // the first Tucker rank is capped by the first TT rank
        assert_eq!(flat, vec![(1, 1, 1), (1, 1, 2), (2, 2, 2), (2, 2, 3)]);
    }

    #[test]
    fn clamps() {
        let s = rank_schedule(&[2, 2, 2], 1, 6);
        assert!(s.iter().all(|r| r.tucker[0] <= 2 && r.shared <= 2 && r.tt.iter().all(|&t| t <= 4)));
        assert_eq!(s.len(), 6);
    }
}
