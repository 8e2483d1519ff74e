//! `key = value` configuration files merged into the argument list.

use std::fs;

/// Parsed configuration lines in file order.
pub struct ConfigFile {
    pub command: Option<String>,
    pub pairs: Vec<(String, String)>,
}

pub fn parse(text: &str) -> Result<ConfigFile, String> {
    let mut command = None;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(format!("line {}: bad key '{k}'", i + 1));
        }
        if k == "command" {
            command = Some(v.to_string());
        } else {
            pairs.push((k.replace('_', "-"), v.to_string()));
        }
    }
    Ok(ConfigFile { command, pairs })
}

/// Remove `--config <path>` from `args` and splice the file's settings in
/// right after the subcommand, so that explicit flags given later win.
pub fn merge(mut args: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a path".into());
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let cfg = parse(&text)?;
    let has_command = args.get(1).is_some_and(|a| !a.starts_with('-'));
    if !has_command {
        match cfg.command {
            Some(c) => args.insert(1, c),
            None => return Err("no subcommand given on the command line or in the config file".into()),
        }
    }
    // list-valued flags accumulate in clap, so explicit keys replace file keys outright
    let explicit: Vec<&str> = args[2..]
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split_once('=').map_or(a, |(k, _)| k))
        .collect();
    let spliced: Vec<String> = cfg
        .pairs
        .into_iter()
        .filter(|(k, _)| !explicit.contains(&k.as_str()))
        .flat_map(|(k, v)| [format!("--{k}"), v])
        .collect();
    args.splice(2..2, spliced);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let c = parse("# run\ncommand = peaks\n\nK = 1  # warm\neps = 0.002,0.07\n").unwrap();
        assert_eq!(c.command.as_deref(), Some("peaks"));
        assert_eq!(c.pairs, vec![("K".into(), "1".into()), ("eps".into(), "0.002,0.07".into())]);
        assert!(parse("K 1").is_err());
    }

    #[test]
    fn explicit_flags_replace_file_values() {
        let dir = std::env::temp_dir().join(format!("evans-ep-cfg-{}", std::process::id()));
        std::fs::write(&dir, "command = wave\nK = 2\node_tol = 1e-9\n").unwrap();
        let args: Vec<String> = ["evans-ep", "--config", dir.to_str().unwrap(), "--K", "3"].map(String::from).to_vec();
        let merged = merge(args).unwrap();
        assert_eq!(merged, ["evans-ep", "wave", "--ode-tol", "1e-9", "--K", "3"]);
        std::fs::remove_file(dir).unwrap();
    }
}
