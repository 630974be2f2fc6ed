//! Background optimization jobs addressed by polling tokens.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::ErrorBody;
use crate::payload::OptimizePayload;

/// Finished jobs beyond this many are forgotten, oldest first.
const RETAINED_JOBS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum JobStatus {
    Running { done: usize, total: usize },
    Succeeded { result: OptimizePayload },
    Failed { error: ErrorBody },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobTicket {
    pub token: String,
}

#[derive(Default)]
pub struct Job {
    done: AtomicUsize,
    total: AtomicUsize,
    outcome: Mutex<Option<Result<OptimizePayload, ErrorBody>>>,
}

impl Job {
    pub fn progress(&self, done: usize, total: usize) {
        self.total.store(total, Ordering::Relaxed);
        self.done.fetch_max(done, Ordering::Relaxed);
    }

    pub fn finish(&self, outcome: Result<OptimizePayload, ErrorBody>) {
        *self.outcome.lock().expect("job poisoned") = Some(outcome);
    }

    fn is_finished(&self) -> bool {
        self.outcome.lock().expect("job poisoned").is_some()
    }

    pub fn status(&self) -> JobStatus {
        match self.outcome.lock().expect("job poisoned").clone() {
            Some(Ok(result)) => JobStatus::Succeeded { result },
            Some(Err(error)) => JobStatus::Failed { error },
            None => JobStatus::Running {
                done: self.done.load(Ordering::Relaxed),
                total: self.total.load(Ordering::Relaxed),
            },
        }
    }
}

#[derive(Default)]
pub struct JobRegistry {
    inner: Mutex<(u64, BTreeMap<u64, Arc<Job>>)>,
}

fn token_of(id: u64) -> String {
    format!("job-{id}")
}

impl JobRegistry {
    pub fn create(&self) -> (String, Arc<Job>) {
        let mut guard = self.inner.lock().expect("registry poisoned");
        let (next, jobs) = &mut *guard;
        *next += 1;
        let job = Arc::new(Job::default());
        jobs.insert(*next, job.clone());
        let finished: Vec<u64> = jobs
            .iter()
            .filter(|(_, j)| j.is_finished())
            .map(|(id, _)| *id)
            .collect();
        for id in finished
            .iter()
            .take(finished.len().saturating_sub(RETAINED_JOBS))
        {
            jobs.remove(id);
        }
        (token_of(*next), job)
    }

    pub fn get(&self, token: &str) -> Option<Arc<Job>> {
        let id: u64 = token.strip_prefix("job-")?.parse().ok()?;
        self.inner
            .lock()
            .expect("registry poisoned")
            .1
            .get(&id)
            .cloned()
    }
}
