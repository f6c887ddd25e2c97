use std::sync::{Condvar, Mutex};

/// Returned by [`PhaseBarrier::wait`] once a participant has failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Poisoned;

#[derive(Debug)]
struct State {
    waiting: usize,
    generation: u64,
    poisoned: bool,
}

/// Reusable barrier that can be poisoned so peers of a failed worker stop
/// waiting instead of blocking forever.
#[derive(Debug)]
pub struct PhaseBarrier {
    parties: usize,
    state: Mutex<State>,
    cvar: Condvar,
}

impl PhaseBarrier {
    pub fn new(parties: usize) -> Self {
        assert!(parties > 0);
        PhaseBarrier {
            parties,
            state: Mutex::new(State {
                waiting: 0,
                generation: 0,
                poisoned: false,
            }),
            cvar: Condvar::new(),
        }
    }

    pub fn wait(&self) -> Result<(), Poisoned> {
        let mut st = self.state.lock().unwrap_or_else(|e| e.into_inner());
        if st.poisoned {
            return Err(Poisoned);
        }
        st.waiting += 1;
        if st.waiting == self.parties {
            st.waiting = 0;
            st.generation += 1;
            self.cvar.notify_all();
            return Ok(());
        }
        let gen = st.generation;
        while st.generation == gen && !st.poisoned {
            st = self.cvar.wait(st).unwrap_or_else(|e| e.into_inner());
        }
        if st.generation == gen {
            Err(Poisoned)
        } else {
            Ok(())
        }
    }

    pub fn poison(&self) {
        let mut st = self.state.lock().unwrap_or_else(|e| e.into_inner());
        st.poisoned = true;
        self.cvar.notify_all();
    }

    pub fn is_poisoned(&self) -> bool {
        self.state.lock().unwrap_or_else(|e| e.into_inner()).poisoned
    }
}

/// Poisons the barrier if dropped during a panic.
pub struct PoisonOnPanic<'a>(pub &'a PhaseBarrier);

impl Drop for PoisonOnPanic<'_> {
    fn drop(&mut self) {
        if std::thread::panicking() {
            self.0.poison();
        }
    }
}
