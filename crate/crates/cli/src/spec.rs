//! Mini-grammars for channel, state and range arguments.
//!
//! ```text
//! channel := name [":" param ("," param)*]
//!            name ∈ identity | unitary | depolarizing | dephasing | amplitude_damping | random
//!            random takes two integers: Kraus count and seed
//! state   := "schmidt:" w1 ("," w)* | "haar:" seed | "file:" path
//! range   := start ":" stop ":" step      (step > 0, stop >= start)
//! ```

use std::path::Path;
use std::str::FromStr;

use tanglebound::channels::{make_standard, random_channel, ChannelFamily};
use tanglebound::io::read_state;
use tanglebound::states::{random_pure, state_from_schmidt_weights};
use tanglebound::{Channel, PureState};

use crate::CliError;

fn parse_list<T: FromStr>(flag: &str, s: &str) -> Result<Vec<T>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| CliError::Usage(format!("{flag}: cannot parse '{p}'")))
        })
        .collect()
}

/// Splits `name[:params]`.
fn split_spec(s: &str) -> (&str, &str) {
    s.split_once(':').unwrap_or((s, ""))
}

pub fn parse_channel(spec: &str, dim: usize) -> Result<Channel, CliError> {
    let (name, rest) = split_spec(spec);
    let params = parse_list::<f64>("--channel", rest)?;
    channel_from_params(name, &params, dim)
}

/// Builds a channel from a family name and numeric parameters.
pub fn channel_from_params(name: &str, params: &[f64], dim: usize) -> Result<Channel, CliError> {
    let usage = |e: tanglebound::Error| CliError::Usage(format!("--channel: {e}"));
    if name == "random" {
        let [k, seed] = params else {
            return Err(CliError::Usage("--channel: random takes <kraus_count>,<seed>".into()));
        };
        if k.fract() != 0.0 || seed.fract() != 0.0 || *k < 1.0 || *seed < 0.0 {
            return Err(CliError::Usage("--channel: random parameters must be nonnegative integers".into()));
        }
        return random_channel(dim, *k as usize, *seed as u64).map_err(usage);
    }
    let family = ChannelFamily::from_str(name).map_err(usage)?;
    make_standard(family, dim, params).map_err(usage)
}

pub fn parse_state(spec: &str, dim: usize) -> Result<PureState, CliError> {
    let usage = |e: tanglebound::Error| CliError::Usage(format!("--state: {e}"));
    let (kind, rest) = split_spec(spec);
    let psi = match kind {
        "schmidt" => {
            let weights = parse_list::<f64>("--state", rest)?;
            state_from_schmidt_weights(&weights, dim).map_err(usage)?
        }
        "haar" => {
            let seed = rest
                .trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("--state: bad seed '{rest}'")))?;
            random_pure(dim, dim, seed).map_err(usage)?
        }
        "file" => read_state(Path::new(rest)).map_err(|e| CliError::Input(format!("--state {rest}: {e}")))?,
        _ => {
            return Err(CliError::Usage(format!(
                "--state: unknown kind '{kind}' (expected schmidt, haar or file)"
            )))
        }
    };
    if psi.dim_a() != dim || psi.dim_b() != dim {
        return Err(CliError::Usage(format!(
            "--state: {}x{} state for --dim {dim}",
            psi.dim_a(),
            psi.dim_b()
        )));
    }
    Ok(psi)
}

/// Grid values `start + i·step` up to `stop`, with the last point snapped
/// to `stop` when within roundoff.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts = spec.split(':').collect::<Vec<_>>();
    let [start, stop, step] = parts.as_slice() else {
        return Err(CliError::Usage(format!("--param: expected start:stop:step, got '{spec}'")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::Usage(format!("--param: cannot parse '{s}'")))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if step <= 0.0 {
        return Err(CliError::Usage("--param: step must be > 0".into()));
    }
    if stop < start {
        return Err(CliError::Usage("--param: stop must be >= start".into()));
    }
    let slack = 1e-9 * step;
    let mut values = Vec::new();
    for i in 0u64.. {
        let v = start + i as f64 * step;
        if v > stop + slack {
            break;
        }
        values.push(if (v - stop).abs() <= slack { stop } else { v });
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let tenth = parse_range("0:1:0.1").unwrap();
        assert_eq!(tenth.len(), 11);
        assert_eq!(*tenth.last().unwrap(), 1.0);
        assert_eq!(parse_range("0.5:0.5:1").unwrap(), vec![0.5]);
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn channels() {
        assert_eq!(parse_channel("identity", 3).unwrap().kraus().len(), 1);
        assert_eq!(parse_channel("amplitude_damping:0.5", 2).unwrap().kraus().len(), 2);
        assert_eq!(parse_channel("random:3,7", 2).unwrap().kraus().len(), 3);
        assert!(matches!(parse_channel("bogus", 2), Err(CliError::Usage(_))));
        assert!(matches!(parse_channel("depolarizing:x", 2), Err(CliError::Usage(_))));
        assert!(matches!(parse_channel("random:1.5,2", 2), Err(CliError::Usage(_))));
        assert!(matches!(parse_channel("amplitude_damping:0.5", 3), Err(CliError::Usage(_))));
    }

    #[test]
    fn states() {
        let psi = parse_state("schmidt:0.5,0.3,0.2", 3).unwrap();
        assert_eq!(psi.dim_a(), 3);
        assert!(parse_state("haar:4", 2).is_ok());
        assert!(matches!(parse_state("schmidt:0.5,0.4", 2), Err(CliError::Usage(_))));
        assert!(matches!(parse_state("ghz", 2), Err(CliError::Usage(_))));
        assert!(matches!(
            parse_state("file:/nonexistent/state.json", 2),
            Err(CliError::Input(_))
        ));
    }
}
