//! Enumeration of index sequences over observations.
//!
//! Two families drive the combinatorial oracles: acyclic sequences (ordered
//! selections without repetition, length >= 1) and simple directed cycles.
//! Counts grow factorially, so callers gate these behind a cap on `T`.

/// Visits every acyclic sequence of indices from `0..t` with length in
/// `1..=max_len`. When `root` is set, only sequences starting there.
pub fn for_each_sequence<F: FnMut(&[usize])>(
    t: usize,
    max_len: usize,
    root: Option<usize>,
    mut f: F,
) {
    let mut seq = Vec::with_capacity(max_len);
    let mut used = vec![false; t];
    match root {
        Some(r) => {
            seq.push(r);
            used[r] = true;
            f(&seq);
            extend(t, max_len, &mut seq, &mut used, &mut f);
        }
        None => {
            for s in 0..t {
                seq.push(s);
                used[s] = true;
                f(&seq);
                extend(t, max_len, &mut seq, &mut used, &mut f);
                used[s] = false;
                seq.pop();
            }
        }
    }
}

fn extend<F: FnMut(&[usize])>(
    t: usize,
    max_len: usize,
    seq: &mut Vec<usize>,
    used: &mut [bool],
    f: &mut F,
) {
    if seq.len() >= max_len {
        return;
    }
    for next in 0..t {
        if used[next] {
            continue;
        }
        seq.push(next);
        used[next] = true;
        f(seq);
        extend(t, max_len, seq, used, f);
        used[next] = false;
        seq.pop();
    }
}

/// Visits every simple directed cycle over `0..t` with length in `2..=t`,
/// each exactly once (the smallest index of the cycle is fixed as the
/// starting point, so both orientations of longer cycles appear).
pub fn for_each_cycle<F: FnMut(&[usize])>(t: usize, mut f: F) {
    let mut seq = Vec::with_capacity(t);
    let mut used = vec![false; t];
    for start in 0..t {
        seq.push(start);
        used[start] = true;
        grow_cycle(t, start, &mut seq, &mut used, &mut f);
        used[start] = false;
        seq.pop();
    }
}

fn grow_cycle<F: FnMut(&[usize])>(
    t: usize,
    start: usize,
    seq: &mut Vec<usize>,
    used: &mut [bool],
    f: &mut F,
) {
    for next in (start + 1)..t {
        if used[next] {
            continue;
        }
        seq.push(next);
        used[next] = true;
        if seq.len() >= 2 {
            f(seq);
        }
        grow_cycle(t, start, seq, used, f);
        used[next] = false;
        seq.pop();
    }
}
