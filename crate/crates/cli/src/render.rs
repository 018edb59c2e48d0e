use serde_json::Value;

use crate::Format;

/// A titled grid of already formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub caption: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Section {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Section {
            caption: None,
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn caption(mut self, caption: impl Into<String>) -> Self {
        self.caption = Some(caption.into());
        self
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Everything a command prints: the JSON document and its tabular view.
#[derive(Debug, Clone)]
pub struct Report {
    pub title: String,
    pub json: Value,
    pub sections: Vec<Section>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>, json: Value) -> Self {
        Report {
            title: title.into(),
            json,
            sections: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Md => self.markdown(),
            Format::Tsv => self.tsv(),
        }
    }

    fn markdown(&self) -> String {
        let mut out = format!("## {}\n", self.title);
        for section in &self.sections {
            out.push('\n');
            if let Some(c) = &section.caption {
                out.push_str(&format!("{c}\n\n"));
            }
            out.push_str(&md_row(&section.headers));
            out.push_str(&md_row(&vec!["---".to_string(); section.headers.len()]));
            for row in &section.rows {
                out.push_str(&md_row(row));
            }
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for n in &self.notes {
                out.push_str(&format!("- {n}\n"));
            }
        }
        out
    }

    fn tsv(&self) -> String {
        let mut blocks = Vec::new();
        for section in &self.sections {
            let mut block = String::new();
            if let Some(c) = &section.caption {
                block.push_str(&format!("# {c}\n"));
            }
            block.push_str(&section.headers.join("\t"));
            block.push('\n');
            for row in &section.rows {
                block.push_str(&row.join("\t"));
                block.push('\n');
            }
            blocks.push(block);
        }
        blocks.join("\n")
    }
}

fn md_row(cells: &[String]) -> String {
    let escaped: Vec<String> = cells.iter().map(|c| c.replace('|', "\\|")).collect();
    format!("| {} |\n", escaped.join(" | "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut s = Section::new(["n", "a_n/b_n"]).caption("level 6");
        s.push(["2", "351/292"]);
        let mut r = Report::new("approximants", json!({"rows": 1}));
        r.sections.push(s);
        r
    }

    #[test]
    fn markdown_layout() {
        assert_eq!(
            sample().render(Format::Md),
            "## approximants\n\nlevel 6\n\n| n | a_n/b_n |\n| --- | --- |\n| 2 | 351/292 |\n"
        );
    }

    #[test]
    fn tsv_and_json_layout() {
        assert_eq!(sample().render(Format::Tsv), "# level 6\nn\ta_n/b_n\n2\t351/292\n");
        assert_eq!(sample().render(Format::Json), "{\n  \"rows\": 1\n}\n");
    }
}
