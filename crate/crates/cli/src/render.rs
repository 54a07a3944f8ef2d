use serde_json::Value;

// Leaves and arrays without objects stay on one line as compact JSON.
fn inline(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(a) => a.iter().all(inline),
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn walk(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if inline(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    walk(x, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for (idx, x) in items.iter().enumerate() {
                if inline(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}[{idx}]\n"));
                    walk(x, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

/// Indented `key: value` lines carrying the same fields and numbers as the JSON form.
pub fn text(v: &Value) -> String {
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_layout() {
        let v: Value = serde_json::from_str(r#"{"p":5,"gens":[[[1,0],[5,1]]],"c":{"h1":[],"ok":true},"xs":[{"a":1}]}"#).unwrap();
        assert_eq!(text(&v), "p: 5\ngens: [[[1,0],[5,1]]]\nc:\n  h1: []\n  ok: true\nxs:\n  [0]\n    a: 1\n");
    }
}
