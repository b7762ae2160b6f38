//! Name-keyed registries of interchangeable engines: support computations for
//! free powers and k-positivity search strategies. The CLI resolves its
//! `--engine` and `--strategy` flags here.

use crate::error::{domain, Error, Result};
use crate::freeconv::{closed_form_power, free_power, numeric_free_power_support};
use crate::kposcheck::{net_check, see_saw_with, KPosResult, SeeSawOptions};
use crate::measures::{MeasureSpec, SupportProfile};
use crate::rmt::{BipartiteOperator, Seed};

/// Computes the support of `μ^{⊞T}`.
pub trait SupportEngine: Send + Sync {
    fn name(&self) -> &'static str;
    fn support(&self, spec: &MeasureSpec, power: f64) -> Result<SupportProfile>;
}

/// Searches for a violation of k-positivity of a Choi matrix.
pub trait KPosStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn check(&self, c: &BipartiteOperator, k: usize, seed: Seed) -> Result<KPosResult>;
}

/// Closed form when available, critical-point scan otherwise.
pub struct AutoEngine;

impl SupportEngine for AutoEngine {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn support(&self, spec: &MeasureSpec, power: f64) -> Result<SupportProfile> {
        Ok(free_power(spec, power)?.support)
    }
}

pub struct ClosedFormEngine;

impl SupportEngine for ClosedFormEngine {
    fn name(&self) -> &'static str {
        "closed_form"
    }

    fn support(&self, spec: &MeasureSpec, power: f64) -> Result<SupportProfile> {
        spec.validate()?;
        if !(power >= 1.0) {
            return Err(domain(format!("free convolution power needs T >= 1, got {power}")));
        }
        closed_form_power(spec, power)
            .map(|m| m.support())
            .ok_or(Error::UnsupportedVariant {
                op: "closed_form",
                variant: "no closed form",
            })
    }
}

pub struct CriticalPointEngine;

impl SupportEngine for CriticalPointEngine {
    fn name(&self) -> &'static str {
        "critical_point"
    }

    fn support(&self, spec: &MeasureSpec, power: f64) -> Result<SupportProfile> {
        spec.validate()?;
        if !(power >= 1.0) {
            return Err(domain(format!("free convolution power needs T >= 1, got {power}")));
        }
        numeric_free_power_support(spec, power)
    }
}

pub struct SeeSawStrategy(pub SeeSawOptions);

impl KPosStrategy for SeeSawStrategy {
    fn name(&self) -> &'static str {
        "see_saw"
    }

    fn check(&self, c: &BipartiteOperator, k: usize, seed: Seed) -> Result<KPosResult> {
        see_saw_with(c, k, &self.0, seed)
    }
}

pub struct NetStrategy {
    pub resolution: usize,
}

impl KPosStrategy for NetStrategy {
    fn name(&self) -> &'static str {
        "net"
    }

    fn check(&self, c: &BipartiteOperator, k: usize, _seed: Seed) -> Result<KPosResult> {
        net_check(c, k, self.resolution)
    }
}

/// Ordered collection of named trait objects.
pub struct Registry<T: ?Sized> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new() -> Self {
        Registry { entries: Vec::new() }
    }

    pub fn register(&mut self, entry: Box<T>) {
        self.entries.push(entry);
    }
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Self::new()
    }
}

macro_rules! lookup {
    ($t:ty) => {
        impl Registry<$t> {
            pub fn get(&self, name: &str) -> Result<&$t> {
                self.entries
                    .iter()
                    .find(|e| e.name() == name)
                    .map(|e| e.as_ref())
                    .ok_or_else(|| {
                        domain(format!(
                            "unknown name {name:?}, expected one of {:?}",
                            self.names()
                        ))
                    })
            }

            pub fn names(&self) -> Vec<&'static str> {
                self.entries.iter().map(|e| e.name()).collect()
            }
        }
    };
}

lookup!(dyn SupportEngine);
lookup!(dyn KPosStrategy);

pub fn support_engines() -> Registry<dyn SupportEngine> {
    let mut r: Registry<dyn SupportEngine> = Registry::new();
    r.register(Box::new(AutoEngine));
    r.register(Box::new(ClosedFormEngine));
    r.register(Box::new(CriticalPointEngine));
    r
}

/// Default strategies: see-saw with `opts` and the net with `net_resolution`.
pub fn kpos_strategies(opts: SeeSawOptions, net_resolution: usize) -> Registry<dyn KPosStrategy> {
    let mut r: Registry<dyn KPosStrategy> = Registry::new();
    r.register(Box::new(SeeSawStrategy(opts)));
    r.register(Box::new(NetStrategy {
        resolution: net_resolution,
    }));
    r
}
