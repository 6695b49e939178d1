//! Provider backed by pre-annotated documents on disk, one `<id>.json` per
//! article in the interchange format.

use std::path::{Path, PathBuf};

use crate::annotation::{AnnotationProvider, Capabilities};
use crate::document::{AnnotatedDocument, Layers, RawArticle};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FileProvider {
    dir: PathBuf,
}

impl FileProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FileProvider { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    pub fn load(&self, id: &str) -> Result<AnnotatedDocument> {
        let path = self.path_for(id);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        AnnotatedDocument::parse(&bytes)
    }
}

impl AnnotationProvider for FileProvider {
    fn name(&self) -> &str {
        "file"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::all()
    }

    fn annotate(&self, article: &RawArticle) -> Result<Layers> {
        let doc = self.load(&article.id)?;
        if doc.article.body != article.body || doc.article.title != article.title {
            return Err(Error::Invalid(format!(
                "{}: annotated article text differs from the input article",
                self.path_for(&article.id).display()
            )));
        }
        Ok(doc.into_parts().1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::heuristic::HeuristicProvider;
    use crate::annotation::{annotate, TemporalGrammar};

    #[test]
    fn round_trips_through_disk() {
        let dir = std::env::temp_dir().join(format!("qqoqcp-file-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let article = RawArticle {
            id: "f1".into(),
            outlet: None,
            title: "Le maire parle".into(),
            body: "Le maire de Québec parle mardi.".into(),
        };
        let doc = annotate(&article, &[&HeuristicProvider::default()], &TemporalGrammar::builtin()).unwrap();
        std::fs::write(dir.join("f1.json"), doc.to_json()).unwrap();
        let fp = FileProvider::new(&dir);
        let again = annotate(&article, &[&fp], &TemporalGrammar::builtin()).unwrap();
        assert_eq!(again, doc);

        let mut changed = article.clone();
        changed.body.push_str(" Fin.");
        assert!(fp.annotate(&changed).is_err());
        let mut missing = article;
        missing.id = "absent".into();
        assert!(matches!(fp.annotate(&missing), Err(Error::Io { .. })));
        std::fs::remove_dir_all(&dir).ok();
    }
}
