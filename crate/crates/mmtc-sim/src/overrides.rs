//! Dotted `key=value` overrides on a parsed TOML document.
//!
//! `a.b=1` sets a nested key, creating tables on the way. Array elements are
//! addressed by index (`variant.0.label=x`) or all at once with `*`. Values
//! are read as TOML (`[1, 2]`, `true`, `"s"`, `2.5`); anything that does not
//! parse is taken as a bare string.

use anyhow::{anyhow, bail, Result};
use toml::{Table, Value};

pub fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    match toml::from_str::<Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key was just written"),
        Err(_) => Value::String(raw.to_string()),
    }
}

pub fn apply_override(root: &mut Table, spec: &str) -> Result<()> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| anyhow!("expected key=value"))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        bail!("empty path segment in `{key}`");
    }
    set_in_table(root, &path, parse_value(raw))
}

fn set_in_table(table: &mut Table, path: &[&str], value: Value) -> Result<()> {
    let (head, rest) = path.split_first().expect("path is nonempty");
    if rest.is_empty() {
        table.insert(head.to_string(), value);
        return Ok(());
    }
    let child = table.entry(head.to_string()).or_insert_with(|| Value::Table(Table::new()));
    set_in_value(child, rest, value)
}

fn set_in_value(node: &mut Value, path: &[&str], value: Value) -> Result<()> {
    match node {
        Value::Table(t) => set_in_table(t, path, value),
        Value::Array(items) => {
            let (head, rest) = path.split_first().expect("path is nonempty");
            let targets: Vec<usize> = if *head == "*" {
                (0..items.len()).collect()
            } else {
                let i: usize = head.parse().map_err(|_| anyhow!("`{head}` is not an array index"))?;
                if i >= items.len() {
                    bail!("index {i} out of range for an array of {}", items.len());
                }
                vec![i]
            };
            for i in targets {
                if rest.is_empty() {
                    items[i] = value.clone();
                } else {
                    set_in_value(&mut items[i], rest, value.clone())?;
                }
            }
            Ok(())
        }
        other => bail!("cannot descend into {} value", other.type_str()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_and_wildcard() {
        let mut t: Table = toml::from_str("a = 1\n[[v]]\nx = 1\n[[v]]\nx = 2\n").unwrap();
        apply_override(&mut t, "b.c=[1, 2]").unwrap();
        apply_override(&mut t, "v.*.x=7").unwrap();
        apply_override(&mut t, "v.1.y=name").unwrap();
        assert_eq!(t["b"]["c"], Value::Array(vec![Value::Integer(1), Value::Integer(2)]));
        assert_eq!(t["v"][0]["x"], Value::Integer(7));
        assert_eq!(t["v"][1]["y"], Value::String("name".into()));
        assert!(apply_override(&mut t, "v.5.x=1").is_err());
        assert!(apply_override(&mut t, "a.b=1").is_err());
        assert!(apply_override(&mut t, "novalue").is_err());
    }
}
