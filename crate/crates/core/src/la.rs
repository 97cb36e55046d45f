//! Variable-structure learning automata with linear reinforcement.
//!
//! An [`Automaton`] keeps a probability vector over `r` actions. Each step it
//! draws an action, the environment answers with a [`Signal`], and the vector
//! moves toward the action on reward (rate `a`) or away from it on penalty
//! (rate `b`).

use rand::Rng;

use crate::error::{Error, Result};

const RENORMALIZE_DRIFT: f64 = 1e-12;

/// Environment response. `Reward` is the binary input 0, `Penalty` is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signal {
    Reward,
    Penalty,
}

impl TryFrom<u8> for Signal {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Signal::Reward),
            1 => Ok(Signal::Penalty),
            other => Err(Error::invalid(format!(
                "reinforcement signal must be 0 or 1, got {other}"
            ))),
        }
    }
}

/// Family of the linear scheme implied by the two learning rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// `a == b`
    RewardPenalty,
    /// `b == 0`
    RewardInaction,
    /// `a` dominates `b` by at least an order of magnitude.
    RewardEpsilonPenalty,
    /// Any other combination of rates.
    Linear,
}

impl Scheme {
    pub fn classify(reward_rate: f64, penalty_rate: f64) -> Scheme {
        if penalty_rate == 0.0 && reward_rate > 0.0 {
            Scheme::RewardInaction
        } else if reward_rate == penalty_rate {
            Scheme::RewardPenalty
        } else if reward_rate >= 10.0 * penalty_rate {
            Scheme::RewardEpsilonPenalty
        } else {
            Scheme::Linear
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Automaton {
    probabilities: Vec<f64>,
    reward_rate: f64,
    penalty_rate: f64,
}

impl Automaton {
    /// Creates an automaton over `actions` actions with uniform probabilities.
    pub fn new(actions: usize, reward_rate: f64, penalty_rate: f64) -> Result<Self> {
        if actions < 2 {
            return Err(Error::config(format!(
                "an automaton needs at least 2 actions, got {actions}"
            )));
        }
        for (name, rate) in [("reward", reward_rate), ("penalty", penalty_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::config(format!(
                    "{name} rate must be in [0, 1], got {rate}"
                )));
            }
        }
        Ok(Automaton {
            probabilities: vec![1.0 / actions as f64; actions],
            reward_rate,
            penalty_rate,
        })
    }

    /// Replaces the probability vector. Must be a simplex of the same arity.
    pub fn with_probabilities(mut self, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != self.probabilities.len() {
            return Err(Error::invalid(format!(
                "expected {} probabilities, got {}",
                self.probabilities.len(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p))
            || (probabilities.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::invalid(format!(
                "probabilities {probabilities:?} are not a simplex"
            )));
        }
        self.probabilities = probabilities;
        Ok(self)
    }

    pub fn action_count(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn reward_rate(&self) -> f64 {
        self.reward_rate
    }

    pub fn penalty_rate(&self) -> f64 {
        self.penalty_rate
    }

    pub fn scheme(&self) -> Scheme {
        Scheme::classify(self.reward_rate, self.penalty_rate)
    }

    /// Draws an action index according to the current probabilities.
    pub fn select_action<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        for (i, p) in self.probabilities.iter().enumerate() {
            cumulative += p;
            if u < cumulative {
                return i;
            }
        }
        // u landed in the rounding gap above the last partial sum
        self.probabilities
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(self.probabilities.len() - 1)
    }

    /// Applies one linear reinforcement step for `action`.
    pub fn reinforce(&mut self, action: usize, signal: Signal) -> Result<()> {
        let r = self.probabilities.len();
        if action >= r {
            return Err(Error::invalid(format!(
                "action {action} out of range for {r} actions"
            )));
        }
        match signal {
            Signal::Reward => {
                let a = self.reward_rate;
                for (j, p) in self.probabilities.iter_mut().enumerate() {
                    *p = if j == action { *p + a * (1.0 - *p) } else { *p * (1.0 - a) };
                }
            }
            Signal::Penalty => {
                let b = self.penalty_rate;
                let share = b / (r - 1) as f64;
                for (j, p) in self.probabilities.iter_mut().enumerate() {
                    *p = if j == action { *p * (1.0 - b) } else { share + (1.0 - b) * *p };
                }
            }
        }
        let total: f64 = self.probabilities.iter().sum();
        if (total - 1.0).abs() > RENORMALIZE_DRIFT {
            self.probabilities.iter_mut().for_each(|p| *p /= total);
        }
        Ok(())
    }
}
