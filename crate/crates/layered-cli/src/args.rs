//! Shared flag groups and the file loaders behind them.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use layered_core::maps::{MapDescriptor, MapFamily};
use layered_core::statement::{FamilyVariant, Statement, StatementKind};
use layered_core::{Element, Semigroup, SemigroupKind};

use crate::Failure;

#[derive(Args, Debug)]
pub struct SgArgs {
    /// Semigroup kind: FIN, FINSETS, W, L or FINA.
    #[arg(long)]
    pub kind: String,
    /// Alphabet letters, e.g. `ab` (required for W, L and FINA).
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Ordered variant: sums require left support strictly before right.
    #[arg(long)]
    pub ordered: bool,
}

impl SgArgs {
    pub fn build(&self) -> Result<Semigroup, Failure> {
        let kind = SemigroupKind::parse(&self.kind).map_err(Failure::usage)?;
        let letters: Option<Vec<char>> = self.alphabet.as_ref().map(|a| a.chars().collect());
        Semigroup::new(kind, letters.as_deref(), self.ordered).map_err(Failure::usage)
    }
}

#[derive(Args, Debug)]
pub struct FragArgs {
    /// Largest layer in the fragment.
    #[arg(long)]
    pub max_layer: u32,
    /// Support/length bound of the fragment.
    #[arg(long)]
    pub size: u32,
}

impl FragArgs {
    pub fn spec(&self) -> layered_core::FragmentSpec {
        layered_core::FragmentSpec::new(self.max_layer, self.size)
    }
}

#[derive(Args, Debug)]
pub struct StatementArgs {
    /// Statement name (vdw, hj, gr, gowers, fu, gg, bbh, tuple) or a full
    /// `statement ...` line.
    #[arg(long)]
    pub statement: String,
    /// Progression length (vdw) or substitution target layer (gr, tuple).
    #[arg(long)]
    pub k: Option<u32>,
    /// Tuple arity (fu, gg, gr, tuple).
    #[arg(long)]
    pub m: Option<u32>,
    /// Source layer (gowers, bbh, tuple).
    #[arg(long)]
    pub n: Option<u32>,
    /// Target layers for gowers, e.g. `1,2`.
    #[arg(long)]
    pub kset: Option<String>,
    /// Alphabet letters (hj, gr, bbh).
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Map family for gowers: `full` or `iterated`.
    #[arg(long)]
    pub family: Option<String>,
    /// Block sequence length (gowers, bbh, tuple).
    #[arg(long)]
    pub block: Option<u32>,
    /// Ordered-variant statements.
    #[arg(long)]
    pub ordered: bool,
    /// Fragment size parameter.
    #[arg(long = "N")]
    pub size: Option<u32>,
}

impl StatementArgs {
    fn flag(&self, v: Option<u32>, name: &str) -> Result<u32, Failure> {
        v.ok_or_else(|| {
            Failure::new(2, format!("statement `{}` needs --{name}", self.statement))
        })
    }

    fn letters(&self) -> Result<Vec<char>, Failure> {
        self.alphabet
            .as_ref()
            .map(|a| a.chars().collect())
            .ok_or_else(|| {
                Failure::new(2, format!("statement `{}` needs --alphabet", self.statement))
            })
    }

    pub fn build(&self) -> Result<Statement, Failure> {
        if self.statement.starts_with("statement ") {
            return Statement::parse(&self.statement).map_err(Failure::usage);
        }
        let kind = match self.statement.as_str() {
            "vdw" => StatementKind::VanDerWaerden {
                k: self.flag(self.k, "k")?,
            },
            "hj" => StatementKind::HalesJewett {
                alphabet: self.letters()?,
            },
            "gr" => StatementKind::GrahamRothschild {
                alphabet: self.letters()?,
                k: self.flag(self.k, "k")?,
                m: self.flag(self.m, "m")?,
            },
            "gowers" => StatementKind::Gowers {
                n: self.flag(self.n, "n")?,
                k_set: self.parse_kset()?,
                family: self.parse_family()?,
                block_len: self.flag(self.block, "block")?,
                ordered: self.ordered,
            },
            "fu" => StatementKind::FiniteUnions {
                m: self.flag(self.m, "m")?,
            },
            "gg" => StatementKind::GalvinGlazer {
                m: self.flag(self.m, "m")?,
            },
            "bbh" => StatementKind::LocatedBbh {
                alphabet: self.letters()?,
                n: self.flag(self.n, "n")?,
                block_len: self.flag(self.block, "block")?,
                ordered: self.ordered,
            },
            "tuple" => StatementKind::TupleSpan {
                m: self.flag(self.m, "m")?,
                n: self.flag(self.n, "n")?,
                k: self.flag(self.k, "k")?,
                block_len: self.flag(self.block, "block")?,
            },
            other => {
                return Err(Failure::new(2, format!("unknown statement `{other}`")));
            }
        };
        let size = self.size.ok_or_else(|| {
            Failure::new(2, format!("statement `{}` needs --N", self.statement))
        })?;
        Statement::new(kind, size).map_err(Failure::usage)
    }

    /// As [`build`](Self::build) but tolerating a missing `--N` (bound scans
    /// supply their own level sizes), placeholding with 1.
    pub fn build_for_bound(&self) -> Result<Statement, Failure> {
        if self.size.is_some() || self.statement.starts_with("statement ") {
            return self.build();
        }
        let mut with_n = Self {
            statement: self.statement.clone(),
            k: self.k,
            m: self.m,
            n: self.n,
            kset: self.kset.clone(),
            alphabet: self.alphabet.clone(),
            family: self.family.clone(),
            block: self.block,
            ordered: self.ordered,
            size: Some(1),
        };
        // gr needs N >= m to validate.
        if self.statement == "gr" {
            with_n.size = Some(self.m.unwrap_or(1).max(1));
        }
        with_n.build()
    }

    fn parse_kset(&self) -> Result<Vec<u32>, Failure> {
        let text = self.kset.as_ref().ok_or_else(|| {
            Failure::new(2, format!("statement `{}` needs --kset", self.statement))
        })?;
        text.split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::new(2, format!("bad --kset `{text}`: expected layers like 1,2")))
    }

    fn parse_family(&self) -> Result<FamilyVariant, Failure> {
        match self.family.as_deref() {
            Some("full") => Ok(FamilyVariant::Full),
            Some("iterated") => Ok(FamilyVariant::Iterated),
            Some(other) => Err(Failure::new(
                2,
                format!("bad --family `{other}`: expected full or iterated"),
            )),
            None => Err(Failure::new(
                2,
                format!("statement `{}` needs --family full|iterated", self.statement),
            )),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))
}

/// Element-per-line sequence file; parse errors name the 1-based line.
pub fn load_elements(path: &PathBuf, sg: &Semigroup) -> Result<Vec<Element>, Failure> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match sg.parse_element(line) {
            Ok(e) => out.push(e),
            Err(e) => {
                return Err(Failure::new(
                    2,
                    format!("{} line {}: {e}", path.display(), i + 1),
                ));
            }
        }
    }
    if out.is_empty() {
        return Err(Failure::new(2, format!("{}: no elements", path.display())));
    }
    Ok(out)
}

/// Map-descriptor-per-line family file; parse errors name the 1-based line.
pub fn load_family(path: &PathBuf, sg: &Semigroup) -> Result<MapFamily, Failure> {
    let text = read_file(path)?;
    let mut members = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let m = MapDescriptor::parse(line).map_err(|e| {
            Failure::new(2, format!("{} line {}: {e}", path.display(), i + 1))
        })?;
        if !m.compatible_with(sg.kind()) {
            return Err(Failure::new(
                2,
                format!(
                    "{} line {}: `{line}` does not act on {}",
                    path.display(),
                    i + 1,
                    sg.kind().name()
                ),
            ));
        }
        members.push(m);
    }
    if members.is_empty() {
        return Err(Failure::new(2, format!("{}: no maps", path.display())));
    }
    Ok(MapFamily::new(members, false))
}

/// `id ; tetris 0,0`-style inline map list, one per term index.
pub fn parse_map_list(text: &str) -> Result<Vec<MapDescriptor>, Failure> {
    text.split(" ; ")
        .map(|p| MapDescriptor::parse(p.trim()).map_err(Failure::usage))
        .collect()
}

/// `1,3,4`-style 1-based index list.
pub fn parse_indices(text: &str) -> Result<Vec<u32>, Failure> {
    text.split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::new(2, format!("bad --indices `{text}`: expected 1,2,3")))
}
