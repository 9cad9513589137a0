use std::time::{Duration, Instant};

/// Median of `durations`; the mean of the two middle values for even counts.
pub fn median(mut durations: Vec<Duration>) -> Duration {
    assert!(!durations.is_empty(), "median of no samples");
    durations.sort();
    let n = durations.len();
    if n % 2 == 1 {
        durations[n / 2]
    } else {
        (durations[n / 2 - 1] + durations[n / 2]) / 2
    }
}

/// Run `f` once as warmup, then `reps` timed times. Returns the last result
/// and the median wall-clock time.
pub fn timed<T, E>(reps: usize, mut f: impl FnMut() -> Result<T, E>) -> Result<(T, Duration), E> {
    f()?;
    let mut samples = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let out = f()?;
        samples.push(start.elapsed());
        last = Some(out);
    }
    Ok((last.expect("at least one repetition"), median(samples)))
}

pub fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
