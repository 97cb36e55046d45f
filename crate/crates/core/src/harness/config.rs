//! XML experiment configuration.
//!
//! ```xml
//! <aio>
//!   <benchmark>rastrigin</benchmark>
//!   <dims>30</dims>
//!   <super-component type="pso">
//!     <population-size>50</population-size>
//!     <tdr-factor>5</tdr-factor>
//!     <elite-factor>2/3</elite-factor>
//!   </super-component>
//! </aio>
//! ```
//!
//! The root tag names the optimizer (`aio` or `pso`). Parameter leaves may sit
//! directly under the root or inside the single `super-component` element;
//! anything left out keeps its default.

use std::path::PathBuf;
use std::str::FromStr;

use roxmltree::{Document, Node};

use super::{Algorithm, ExperimentConfig};
use crate::benchfn::BenchmarkId;
use crate::error::{Error, Result};

const SUPER_COMPONENT: &str = "super-component";
const SUPPORTED_COMPONENTS: &[&str] = &["pso"];

pub fn parse_config(xml: &str) -> Result<ExperimentConfig> {
    let doc = Document::parse(xml).map_err(|e| {
        let pos = e.pos();
        Error::Parse { line: pos.row, column: pos.col, message: e.to_string() }
    })?;
    let root = doc.root_element();
    let algorithm = match root.tag_name().name() {
        "aio" => Algorithm::Aio,
        "pso" => Algorithm::Pso,
        other => {
            return Err(Error::config(format!(
                "unknown optimizer root tag `<{other}>` at line {} (expected <aio> or <pso>)",
                line_of(&doc, root)
            )))
        }
    };
    let mut config = ExperimentConfig { algorithm, ..ExperimentConfig::default() };
    let mut seen: Vec<String> = Vec::new();
    let mut component_seen = false;

    for child in root.children().filter(Node::is_element) {
        if child.tag_name().name() == SUPER_COMPONENT {
            if component_seen {
                return Err(Error::config(format!(
                    "more than one <{SUPER_COMPONENT}> (line {})",
                    line_of(&doc, child)
                )));
            }
            component_seen = true;
            check_component(&doc, child)?;
            for leaf in child.children().filter(Node::is_element) {
                apply_leaf(&doc, leaf, &mut config, &mut seen)?;
            }
        } else {
            apply_leaf(&doc, child, &mut config, &mut seen)?;
        }
    }
    config.validate()?;
    Ok(config)
}

fn line_of(doc: &Document, node: Node) -> u32 {
    doc.text_pos_at(node.range().start).row
}

fn check_component(doc: &Document, node: Node) -> Result<()> {
    let kind = node.attribute("type").ok_or_else(|| {
        Error::config(format!(
            "<{SUPER_COMPONENT}> at line {} is missing its `type` attribute",
            line_of(doc, node)
        ))
    })?;
    if !SUPPORTED_COMPONENTS.contains(&kind.trim()) {
        return Err(Error::config(format!(
            "unsupported super-component `{kind}` at line {} (supported: {})",
            line_of(doc, node),
            SUPPORTED_COMPONENTS.join(", ")
        )));
    }
    Ok(())
}

fn apply_leaf(
    doc: &Document,
    node: Node,
    config: &mut ExperimentConfig,
    seen: &mut Vec<String>,
) -> Result<()> {
    let tag = node.tag_name().name();
    let line = line_of(doc, node);
    if node.children().any(|c| c.is_element()) {
        return Err(Error::config(format!(
            "<{tag}> at line {line} must hold a single value, not nested elements"
        )));
    }
    if seen.iter().any(|s| s == tag) {
        return Err(Error::config(format!("duplicate <{tag}> at line {line}")));
    }
    let text = node.text().unwrap_or("").trim();
    let leaf = Leaf { tag, line, text };
    let pso = &mut config.pso_params;
    let aio = &mut config.aio_params;
    match tag {
        "benchmark" => config.benchmark = leaf.parse_with(BenchmarkId::from_str)?,
        "dims" => config.dims = leaf.at_least(2)?,
        "runs" => config.runs = leaf.at_least(1)?,
        "seed" => config.base_seed = leaf.parse()?,
        "output" => config.output_path = PathBuf::from(leaf.text),
        "population-size" => pso.population_size = leaf.at_least(2)?,
        "iterations" => pso.max_iterations = leaf.parse()?,
        "c1" => pso.c1 = leaf.positive()?,
        "c2" => pso.c2 = leaf.positive()?,
        "w" => pso.w_fixed = leaf.parse()?,
        "w-max" => pso.w_max = leaf.parse()?,
        "w-min" => pso.w_min = leaf.parse()?,
        "v-max" => pso.v_max = Some(leaf.positive()?),
        "tdr-factor" => aio.swarm_count = leaf.at_least(1)?,
        "elite-factor" => {
            let v = leaf.fraction()?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(leaf.out_of_range("in (0, 1]"));
            }
            aio.elite_factor = v;
        }
        "mutation-rate" => aio.mutation_rate = leaf.unit()?,
        "la-reward" => aio.la_reward = leaf.unit()?,
        "la-penalty" => aio.la_penalty = leaf.unit()?,
        _ => return Err(Error::config(format!("unknown tag <{tag}> at line {line}"))),
    }
    seen.push(tag.to_string());
    Ok(())
}

struct Leaf<'a> {
    tag: &'a str,
    line: u32,
    text: &'a str,
}

impl Leaf<'_> {
    fn parse<T: FromStr>(&self) -> Result<T> {
        self.text.parse().map_err(|_| {
            Error::config(format!(
                "<{}> at line {}: cannot parse `{}`",
                self.tag, self.line, self.text
            ))
        })
    }

    fn parse_with<T>(&self, f: impl FnOnce(&str) -> Result<T>) -> Result<T> {
        f(self.text).map_err(|e| Error::config(format!("<{}> at line {}: {e}", self.tag, self.line)))
    }

    fn out_of_range(&self, bound: &str) -> Error {
        Error::config(format!(
            "<{}> at line {} must be {bound}, got {}",
            self.tag, self.line, self.text
        ))
    }

    fn at_least(&self, min: usize) -> Result<usize> {
        let v: usize = self.parse()?;
        if v < min {
            return Err(self.out_of_range(&format!(">= {min}")));
        }
        Ok(v)
    }

    fn positive(&self) -> Result<f64> {
        let v: f64 = self.parse()?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(self.out_of_range("> 0"));
        }
        Ok(v)
    }

    fn unit(&self) -> Result<f64> {
        let v: f64 = self.parse()?;
        if !(0.0..=1.0).contains(&v) {
            return Err(self.out_of_range("in [0, 1]"));
        }
        Ok(v)
    }

    /// A decimal or a `numerator/denominator` ratio.
    fn fraction(&self) -> Result<f64> {
        match self.text.split_once('/') {
            Some((num, den)) => {
                let bad = || {
                    Error::config(format!(
                        "<{}> at line {}: cannot parse ratio `{}`",
                        self.tag, self.line, self.text
                    ))
                };
                let num: f64 = num.trim().parse().map_err(|_| bad())?;
                let den: f64 = den.trim().parse().map_err(|_| bad())?;
                if den == 0.0 {
                    return Err(bad());
                }
                Ok(num / den)
            }
            None => self.parse(),
        }
    }
}
