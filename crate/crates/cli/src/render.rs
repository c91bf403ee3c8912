//! Text output, derived mechanically from the JSON document so the two
//! formats cannot drift apart.

use serde_json::{Map, Value};

use torcode::qfield::QuadExt;

use crate::commands::Outcome;

/// Longest single-line rendering of an array before it is broken up.
const INLINE_WIDTH: usize = 100;

pub fn render(out: &Outcome) -> String {
    let mut s = String::new();
    for w in &out.warnings {
        s.push_str("warning: ");
        s.push_str(w);
        s.push('\n');
    }
    block(&out.result, 0, &mut s);
    s
}

fn as_quad(o: &Map<String, Value>) -> Option<QuadExt> {
    if o.len() == 5
        && ["p", "q", "s", "D", "approx"]
            .iter()
            .all(|k| o.contains_key(*k))
    {
        serde_json::from_value(Value::Object(o.clone())).ok()
    } else {
        None
    }
}

fn quad_text(x: &QuadExt) -> String {
    if x.is_rational() {
        x.to_string()
    } else {
        format!("{x} ≈ {}", x.approx(15))
    }
}

/// One-line rendering of a value, when it has one.
pub fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(o) => {
            if let Some(x) = as_quad(o) {
                return Some(quad_text(&x));
            }
            // torus points
            if o.len() == 2 {
                if let (Some(x), Some(y)) = (
                    o.get("x").and_then(|v| v.as_object()).and_then(as_quad),
                    o.get("y").and_then(|v| v.as_object()).and_then(as_quad),
                ) {
                    return Some(format!("({}, {})", quad_text(&x), quad_text(&y)));
                }
            }
            None
        }
        Value::Array(a) => {
            // points such as "1/5,2/5" get parentheses inside a list
            let item = |v: &Value| match v {
                Value::String(t) if t.contains(',') => Some(format!("({t})")),
                other => inline(other),
            };
            let parts: Option<Vec<String>> = a.iter().map(item).collect();
            let s = format!("[{}]", parts?.join(", "));
            (s.chars().count() <= INLINE_WIDTH).then_some(s)
        }
    }
}

fn block(v: &Value, indent: usize, s: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                match inline(x) {
                    Some(t) => s.push_str(&format!("{pad}{k}: {t}\n")),
                    None => {
                        s.push_str(&format!("{pad}{k}:\n"));
                        block(x, indent + 2, s);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match inline(x) {
                    Some(t) => s.push_str(&format!("{pad}- {t}\n")),
                    None => {
                        s.push_str(&format!("{pad}-\n"));
                        block(x, indent + 2, s);
                    }
                }
            }
        }
        other => {
            let t = inline(other).unwrap_or_default();
            s.push_str(&format!("{pad}{t}\n"));
        }
    }
}
