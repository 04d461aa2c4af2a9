//! Token-bucket rate limiting, one bucket per provider.

use std::sync::Arc;
use std::time::{Duration, Instant};

use tokio::sync::Mutex;

pub struct RateLimiter {
    state: Option<Mutex<Bucket>>,
}

struct Bucket {
    tokens: f64,
    capacity: f64,
    refill_per_s: f64,
    last: Instant,
}

impl RateLimiter {
    /// `None` disables limiting.
    pub fn per_minute(requests_per_minute: Option<u32>) -> Arc<RateLimiter> {
        let state = requests_per_minute.map(|rpm| {
            let rate = rpm.max(1) as f64 / 60.0;
            Mutex::new(Bucket {
                // Small initial burst so startup is not serialized.
                tokens: 1.0,
                capacity: (rpm as f64 / 6.0).max(1.0),
                refill_per_s: rate,
                last: Instant::now(),
            })
        });
        Arc::new(RateLimiter { state })
    }

    pub async fn acquire(&self) {
        let Some(state) = &self.state else { return };
        loop {
            let wait = {
                let mut bucket = state.lock().await;
                let now = Instant::now();
                let elapsed = now.duration_since(bucket.last).as_secs_f64();
                bucket.last = now;
                bucket.tokens = (bucket.tokens + elapsed * bucket.refill_per_s).min(bucket.capacity);
                if bucket.tokens >= 1.0 {
                    bucket.tokens -= 1.0;
                    return;
                }
                Duration::from_secs_f64((1.0 - bucket.tokens) / bucket.refill_per_s)
            };
            tokio::time::sleep(wait).await;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[tokio::test]
    async fn unlimited_never_waits() {
        let limiter = RateLimiter::per_minute(None);
        let started = Instant::now();
        for _ in 0..1000 {
            limiter.acquire().await;
        }
        assert!(started.elapsed() < Duration::from_millis(100));
    }

    #[tokio::test]
    async fn limited_spaces_requests() {
        // 600 rpm = 10 per second; three extra acquires beyond the burst
        // should take roughly 200-400ms.
        let limiter = RateLimiter::per_minute(Some(600));
        let started = Instant::now();
        for _ in 0..4 {
            limiter.acquire().await;
        }
        let elapsed = started.elapsed();
        assert!(elapsed >= Duration::from_millis(150), "elapsed {elapsed:?}");
        assert!(elapsed < Duration::from_secs(2), "elapsed {elapsed:?}");
    }
}
