//! `--input` specifications for `simulate`.
//!
//! Either a named family with an index (`F:5`, `S:7`, `C:8`, `D:8`) or an
//! explicit comma-separated amplitude list `label=amplitude`, where the
//! amplitude is a complex number such as `0.6`, `-0.8i` or `0.5+0.5i`.

use num_complex::Complex64;
use oamlab::sequence::SequenceSpec;
use oamlab::state::{make_named_state, StateFamily};
use oamlab::{Label, Mode, PureState};

use crate::CliError;

pub fn parse_input(spec: &str, seq: &SequenceSpec, path: &str) -> Result<PureState, CliError> {
    let spec = spec.trim();
    if let Some((family, index)) = spec.split_once(':') {
        let family = match family.trim() {
            "F" => Some(StateFamily::F),
            "S" => Some(StateFamily::S),
            "C" => Some(StateFamily::C),
            "D" => Some(StateFamily::D),
            _ => None,
        };
        if let Some(family) = family {
            let n: i64 = index
                .trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("input `{spec}`: index `{index}` is not an integer")))?;
            return make_named_state(family, n, seq, path).map_err(|e| CliError::Semantic(format!("input `{spec}`: {e}")));
        }
    }
    let mut state = PureState::vacuum();
    for item in spec.split(',') {
        let (label, amp) = item
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("input item `{item}`: expected `label=amplitude` or FAMILY:n")))?;
        let label: Label = label.trim().parse().map_err(|e| CliError::Parse(format!("input item `{item}`: {e}")))?;
        let amp: Complex64 =
            amp.trim().parse().map_err(|_| CliError::Parse(format!("input item `{item}`: bad amplitude `{amp}`")))?;
        state.add(Mode::new(path, label), amp);
    }
    if state.is_empty() {
        return Err(CliError::Semantic(format!("input `{spec}` has zero norm")));
    }
    Ok(state.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> SequenceSpec {
        SequenceSpec::fibonacci(1, 1000)
    }

    #[test]
    fn named_and_explicit() {
        let s = parse_input("S:7", &fib(), "in").unwrap();
        assert_eq!(s.len(), 2);
        let e = parse_input("5=0.6, 8=0.8i", &fib(), "in").unwrap();
        assert!((e.get(&Mode::oam("in", 8)).im - 0.8).abs() < 1e-12);
        let p = parse_input("H=1,V=-1", &fib(), "in").unwrap();
        assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn malformed() {
        assert!(matches!(parse_input("F:x", &fib(), "in"), Err(CliError::Parse(_))));
        assert!(matches!(parse_input("5", &fib(), "in"), Err(CliError::Parse(_))));
        assert!(matches!(parse_input("5=zz", &fib(), "in"), Err(CliError::Parse(_))));
        assert!(matches!(parse_input("F:99", &fib(), "in"), Err(CliError::Semantic(_))));
        assert!(matches!(parse_input("5=0", &fib(), "in"), Err(CliError::Semantic(_))));
    }
}
