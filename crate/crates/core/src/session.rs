//! Event-sourced design sessions.
//!
//! A session owns one evolving population. Every state change appends one
//! [`Event`]; the state itself is a pure function of the event list, so a
//! session log written as JSONL can be replayed into an identical session.
//! Each evolution step draws from its own random stream, keyed by the
//! session seed and the generation index.

use chrono::{DateTime, Utc};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::codec::{normalize, ClosedCurve, CodecConfig, Genome, Point};
use crate::engine::{evolve, GaConfig, IndividualId, Population, MAX_FITNESS};
use crate::harness::{sim_fitness, ConvergenceTrace, PairwiseComparison, Verdict};
use crate::similarity::{compute_bounds, CoefficientBounds, SimilarityParams, DEFAULT_A, DEFAULT_B};
use crate::{Error, Result, Rng};

/// Who grades the individuals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// A designer grades individuals 0..6.
    #[default]
    Interactive,
    /// Every individual is graded by its similarity to a target genome.
    Automated,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub ga: GaConfig,
    pub codec: CodecConfig,
}

/// Everything a session is created from; carried by the `create` event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSetup {
    pub id: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub config: SessionConfig,
    pub curves: Vec<ClosedCurve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<SimilarityParams>,
    /// Required in automated mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Genome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Create,
    Grade,
    Evolve,
    Compare,
}

/// One line of a session log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub event: EventKind,
    /// Generation the event applies to (for `evolve`, the one it closes).
    pub generation: u32,
    pub individual: Option<IndividualId>,
    pub fitness: Option<f64>,
    pub seed: u64,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<SessionSetup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<PairwiseComparison>,
}

/// What one evolution step produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub generation: u32,
    pub population_size: usize,
    pub survivor_ids: Vec<IndividualId>,
    pub child_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    setup: SessionSetup,
    bounds: CoefficientBounds,
    /// Closed generations, oldest first; `history[n]` is generation `n`.
    history: Vec<Population>,
    population: Population,
    trace: ConvergenceTrace,
    comparisons: Vec<PairwiseComparison>,
    log: Vec<Event>,
}

/// Parses raw point lists, naming the first invalid one by index.
pub fn validate_curves(raw: Vec<Vec<Point>>) -> Result<Vec<ClosedCurve>> {
    raw.into_iter()
        .enumerate()
        .map(|(i, points)| {
            ClosedCurve::new(points).map_err(|e| Error::InvalidInput(format!("curve {i}: {e}")))
        })
        .collect()
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl Session {
    pub fn create(setup: SessionSetup) -> Result<Session> {
        let event = Event {
            event: EventKind::Create,
            generation: 0,
            individual: None,
            fitness: None,
            seed: setup.config.ga.rng_seed,
            timestamp: Utc::now(),
            setup: Some(setup),
            comparison: None,
        };
        Session::from_create(event)
    }

    fn from_create(event: Event) -> Result<Session> {
        let setup = event
            .setup
            .clone()
            .ok_or_else(|| Error::invalid("create event without setup"))?;
        if !valid_id(&setup.id) {
            return Err(Error::invalid(format!(
                "session id {:?} must be 1-128 characters of [A-Za-z0-9_-]",
                setup.id
            )));
        }
        setup.config.ga.validate()?;
        setup.config.codec.validate()?;
        if setup.curves.len() < 2 {
            return Err(Error::invalid(format!(
                "a session needs at least 2 initial curves, got {}",
                setup.curves.len()
            )));
        }
        match (setup.mode, &setup.target) {
            (Mode::Automated, None) => return Err(Error::invalid("automated sessions need a target genome")),
            (Mode::Automated, Some(t)) => {
                normalize(t)?;
            }
            _ => {}
        }
        let genomes = setup
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| {
                setup
                    .config
                    .codec
                    .ingest(c)
                    .map_err(|e| Error::InvalidInput(format!("curve {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let span = setup.params.as_ref().map_or(crate::similarity::DEFAULT_GENE_SPAN, |p| p.gene_span());
        let bounds = compute_bounds(&genomes, span.min(setup.config.codec.harmonic_count))?;
        Ok(Session {
            setup,
            bounds,
            history: Vec::new(),
            population: Population::founders(genomes),
            trace: ConvergenceTrace::default(),
            comparisons: Vec::new(),
            log: vec![event],
        })
    }

    pub fn id(&self) -> &str {
        &self.setup.id
    }

    pub fn mode(&self) -> Mode {
        self.setup.mode
    }

    pub fn config(&self) -> &SessionConfig {
        &self.setup.config
    }

    pub fn setup(&self) -> &SessionSetup {
        &self.setup
    }

    /// Bounds computed from the founders.
    pub fn bounds(&self) -> &CoefficientBounds {
        &self.bounds
    }

    /// Calibrated parameters if supplied, otherwise the default exponential
    /// model over the founders' bounds.
    pub fn params(&self) -> Result<SimilarityParams> {
        match &self.setup.params {
            Some(p) => Ok(p.clone()),
            None => SimilarityParams::exponential(DEFAULT_A, DEFAULT_B, self.bounds.clone()),
        }
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn generation_index(&self) -> u32 {
        self.population.generation_index
    }

    /// Population of generation `n`, current or past.
    pub fn generation(&self, n: u32) -> Option<&Population> {
        if n == self.population.generation_index {
            Some(&self.population)
        } else {
            self.history.get(n as usize)
        }
    }

    pub fn trace(&self) -> &ConvergenceTrace {
        &self.trace
    }

    pub fn comparisons(&self) -> &[PairwiseComparison] {
        &self.comparisons
    }

    pub fn log(&self) -> &[Event] {
        &self.log
    }

    fn event(&self, kind: EventKind) -> Event {
        Event {
            event: kind,
            generation: self.population.generation_index,
            individual: None,
            fitness: None,
            seed: self.setup.config.ga.rng_seed,
            timestamp: Utc::now(),
            setup: None,
            comparison: None,
        }
    }

    /// Records an integer grade 0..6 for an individual of the current
    /// generation; a later grade overwrites an earlier one.
    pub fn grade(&mut self, individual: IndividualId, fitness: i64) -> Result<()> {
        let mut event = self.event(EventKind::Grade);
        event.individual = Some(individual);
        event.fitness = Some(fitness as f64);
        self.apply(event)
    }

    /// Evolves the current generation. Interactive sessions need at least
    /// one explicit positive grade (ungraded individuals then take part
    /// with the default fitness); automated sessions grade everyone first.
    pub fn step_generation(&mut self) -> Result<GenerationSummary> {
        self.apply(self.event(EventKind::Evolve))?;
        let survivors: Vec<IndividualId> = self
            .population
            .individuals
            .iter()
            .filter(|i| i.generation_born < self.population.generation_index)
            .map(|i| i.id)
            .collect();
        Ok(GenerationSummary {
            generation: self.population.generation_index,
            population_size: self.population.len(),
            child_count: self.population.len() - survivors.len(),
            survivor_ids: survivors,
        })
    }

    /// Records "left is `verdict` compared with right".
    pub fn compare(&mut self, left: IndividualId, right: IndividualId, verdict: i8) -> Result<()> {
        let mut event = self.event(EventKind::Compare);
        event.comparison = Some(PairwiseComparison {
            left,
            right,
            verdict: Verdict::new(verdict)?,
        });
        self.apply(event)
    }

    fn knows(&self, id: IndividualId) -> bool {
        self.population.get(id).is_some() || self.history.iter().any(|p| p.get(id).is_some())
    }

    /// Applies one non-create event, appending it to the log on success.
    fn apply(&mut self, event: Event) -> Result<()> {
        if event.generation != self.population.generation_index {
            return Err(Error::invalid(format!(
                "event for generation {} but the session is at {}",
                event.generation, self.population.generation_index
            )));
        }
        match event.event {
            EventKind::Create => return Err(Error::invalid("session already created")),
            EventKind::Grade => {
                if self.setup.mode == Mode::Automated {
                    return Err(Error::Precondition("automated sessions are graded by their target".into()));
                }
                let id = event.individual.ok_or_else(|| Error::invalid("grade without individual"))?;
                let f = event.fitness.ok_or_else(|| Error::invalid("grade without fitness"))?;
                if f.fract() != 0.0 || !(0.0..=MAX_FITNESS).contains(&f) {
                    return Err(Error::invalid(format!("fitness {f} is not an integer in 0..=6")));
                }
                if self.population.get(id).is_none() {
                    return Err(Error::NotFound(format!(
                        "individual {id} is not in generation {}",
                        self.population.generation_index
                    )));
                }
                self.population.grade(id, f)?;
            }
            EventKind::Evolve => self.evolve_current()?,
            EventKind::Compare => {
                let c = event.comparison.as_ref().ok_or_else(|| Error::invalid("compare without comparison"))?;
                for id in [c.left, c.right] {
                    if !self.knows(id) {
                        return Err(Error::NotFound(format!("individual {id}")));
                    }
                }
                self.comparisons.push(c.clone());
            }
        }
        self.log.push(event);
        Ok(())
    }

    fn evolve_current(&mut self) -> Result<()> {
        let params = self.params()?;
        let mut graded = self.population.clone();
        if let Some(target) = &self.setup.target {
            if self.setup.mode == Mode::Automated {
                for ind in graded.individuals.iter_mut() {
                    ind.fitness = Some(sim_fitness(&ind.genome, target, &params)?);
                }
            }
        }
        if !graded.individuals.iter().any(|i| i.fitness.is_some_and(|f| f > 0.0)) {
            return Err(Error::Precondition(
                "at least one individual needs a positive grade before evolving".into(),
            ));
        }
        let mut rng = generation_rng(self.setup.config.ga.rng_seed, graded.generation_index);
        let next = evolve(&graded, &self.setup.config.ga, &mut rng)?;
        self.trace.record(&graded, &params)?;
        self.history.push(graded);
        self.population = next;
        Ok(())
    }

    /// Rebuilds a session from its log.
    pub fn replay(events: &[Event]) -> Result<Session> {
        let (first, rest) = events
            .split_first()
            .ok_or_else(|| Error::invalid("empty session log"))?;
        if first.event != EventKind::Create {
            return Err(Error::invalid("a session log starts with a create event"));
        }
        let mut session = Session::from_create(first.clone())?;
        for (i, event) in rest.iter().enumerate() {
            session
                .apply(event.clone())
                .map_err(|e| Error::InvalidInput(format!("log line {}: {e}", i + 2)))?;
        }
        Ok(session)
    }

    pub fn to_jsonl(&self) -> String {
        self.log.iter().map(|e| event_line(e) + "\n").collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Session> {
        let events = parse_jsonl(text)?;
        Session::replay(&events)
    }
}

pub fn event_line(event: &Event) -> String {
    serde_json::to_string(event).expect("events serialize")
}

pub fn parse_jsonl(text: &str) -> Result<Vec<Event>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::InvalidInput(format!("log line {}: {e}", i + 1))))
        .collect()
}

/// Random source for the step that closes `generation`.
pub fn generation_rng(seed: u64, generation: u32) -> Rng {
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(generation as u64);
    rng
}
