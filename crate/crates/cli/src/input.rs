use std::fs;
use std::path::Path;

use factorium::algebra::{parse_algebra, Algebra, Element};
use factorium::fol::{build_semilattice_phi, parse_formula, Formula};
use factorium::gallery::{standard_u_chain, GallerySpec, JOIN};

/// Anything that should end the run with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, UsageError>;

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()))
}

/// An algebra read from a file or built from the gallery; gallery members keep their labels.
pub struct Loaded {
    pub name: String,
    pub algebra: Algebra,
    pub labels: Option<Vec<Vec<usize>>>,
}

impl Loaded {
    /// `gallery:NAME` or a path to a JSON algebra file.
    pub fn from_arg(arg: &str) -> Result<Loaded> {
        if let Some(name) = arg.strip_prefix("gallery:") {
            let spec: GallerySpec = name.parse()?;
            let built = spec.build()?;
            return Ok(Loaded { name: built.name, algebra: built.algebra, labels: Some(built.labels) });
        }
        let text = read(arg)?;
        let algebra = parse_algebra(&text).map_err(|e| UsageError(format!("{arg}: {e}")))?;
        let name = Path::new(arg).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| arg.to_string());
        Ok(Loaded { name, algebra, labels: None })
    }

    pub fn show(&self, e: Element) -> String {
        match &self.labels {
            Some(ls) if ls[e].len() > 1 => format!("({})", ls[e].iter().map(usize::to_string).collect::<Vec<_>>().join(",")),
            Some(ls) => ls[e][0].to_string(),
            None => e.to_string(),
        }
    }

    pub fn show_all(&self, es: &[Element]) -> String {
        es.iter().map(|&e| self.show(e)).collect::<Vec<_>>().join(" ")
    }

    /// An element index, or a label such as `(0,1)` for gallery products.
    pub fn element(&self, text: &str) -> Result<Element> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            let label: Vec<usize> = inner.split(',').map(|p| p.trim().parse()).collect::<std::result::Result<_, _>>()?;
            let labels = self.labels.as_ref().ok_or_else(|| UsageError(format!("`{t}`: labels need a gallery algebra")))?;
            return labels.iter().position(|l| *l == label).ok_or_else(|| UsageError(format!("no element labelled {t}")));
        }
        let i: usize = t.parse().map_err(|_| UsageError(format!("cannot read element `{t}`")))?;
        // Single-coordinate gallery labels coincide with indices.
        if i >= self.algebra.size() {
            return usage(format!("element {i} out of range for {} of size {}", self.name, self.algebra.size()));
        }
        Ok(i)
    }
}

pub fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{path}: {e}")))
}

/// `--formula FILE` or `--expr TEXT`; with neither, `Φ` from the standard u-chain when `∨` is present.
pub fn formula(a: &Algebra, file: Option<&str>, expr: Option<&str>, allow_default: bool) -> Result<Formula> {
    let text = match (file, expr) {
        (Some(_), Some(_)) => return usage("give either --formula or --expr, not both"),
        (Some(f), None) => read(f)?,
        (None, Some(e)) => e.to_string(),
        (None, None) if allow_default && a.op_index(JOIN).is_some() => {
            let chain = standard_u_chain().map_err(|r| UsageError(format!("standard u-chain fails: {r:?}")))?;
            return Ok(build_semilattice_phi(&chain, JOIN));
        }
        (None, None) if allow_default => return usage("no ∨ in the signature: pass --formula or --expr"),
        (None, None) => return usage("pass --formula or --expr"),
    };
    parse_formula(text.trim(), a.signature()).map_err(|e| UsageError(format!("formula: {e}")))
}
