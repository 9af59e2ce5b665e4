use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ImportSource;

/// Environment variable naming the import cache directory.
pub const CACHE_DIR_ENV: &str = "LYPHFORGE_CACHE_DIR";

/// Whether a cached copy of an import may be used without asking the source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CachePolicy {
    AlwaysFetch,
    #[default]
    CacheOk,
}

/// Produces the document text of an import.
pub trait Fetcher {
    fn fetch(&self, source: &ImportSource) -> Result<String, String>;
}

/// Response of a conditional retrieval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reply {
    Body { text: String, etag: Option<String> },
    NotModified,
}

/// Raw retrieval by location, optionally conditional on an entity tag.
pub trait Transport {
    fn get(&self, url: &str, etag: Option<&str>) -> Result<Reply, String>;
}

/// Reads plain paths and `file://` URLs.
#[derive(Clone, Copy, Debug, Default)]
pub struct FileFetcher;

fn file_path(url: &str) -> &str {
    url.strip_prefix("file://").unwrap_or(url)
}

impl Transport for FileFetcher {
    fn get(&self, url: &str, _etag: Option<&str>) -> Result<Reply, String> {
        let text =
            fs::read_to_string(file_path(url)).map_err(|e| format!("cannot read {url}: {e}"))?;
        Ok(Reply::Body { text, etag: None })
    }
}

impl Fetcher for FileFetcher {
    fn fetch(&self, source: &ImportSource) -> Result<String, String> {
        body(self.get(&source.url, None)?, &source.url)
    }
}

fn body(reply: Reply, url: &str) -> Result<String, String> {
    match reply {
        Reply::Body { text, .. } => Ok(text),
        Reply::NotModified => Err(format!("{url}: unexpected not-modified reply")),
    }
}

/// HTTP(S) GET with redirects.
#[cfg(feature = "http")]
#[derive(Debug)]
pub struct HttpFetcher {
    client: reqwest::blocking::Client,
}

#[cfg(feature = "http")]
impl HttpFetcher {
    pub fn new() -> Result<Self, String> {
        let client = reqwest::blocking::Client::builder()
            .redirect(reqwest::redirect::Policy::limited(10))
            .build()
            .map_err(|e| e.to_string())?;
        Ok(HttpFetcher { client })
    }
}

#[cfg(feature = "http")]
impl Transport for HttpFetcher {
    fn get(&self, url: &str, etag: Option<&str>) -> Result<Reply, String> {
        let mut req = self.client.get(url);
        if let Some(tag) = etag {
            req = req.header(reqwest::header::IF_NONE_MATCH, tag);
        }
        let resp = req.send().map_err(|e| format!("cannot fetch {url}: {e}"))?;
        if resp.status() == reqwest::StatusCode::NOT_MODIFIED {
            return Ok(Reply::NotModified);
        }
        if !resp.status().is_success() {
            return Err(format!("cannot fetch {url}: HTTP {}", resp.status()));
        }
        let etag = resp
            .headers()
            .get(reqwest::header::ETAG)
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        let text = resp.text().map_err(|e| format!("cannot read {url}: {e}"))?;
        Ok(Reply::Body { text, etag })
    }
}

#[cfg(feature = "http")]
impl Fetcher for HttpFetcher {
    fn fetch(&self, source: &ImportSource) -> Result<String, String> {
        body(self.get(&source.url, None)?, &source.url)
    }
}

/// Dispatches on the location: `http(s)://` over the network, anything else
/// from the filesystem.
#[derive(Debug, Default)]
pub struct SourceFetcher {
    #[cfg(feature = "http")]
    http: std::sync::OnceLock<Result<HttpFetcher, String>>,
}

fn is_remote(url: &str) -> bool {
    url.starts_with("http://") || url.starts_with("https://")
}

impl Transport for SourceFetcher {
    fn get(&self, url: &str, etag: Option<&str>) -> Result<Reply, String> {
        if !is_remote(url) {
            return FileFetcher.get(url, etag);
        }
        #[cfg(feature = "http")]
        {
            match self.http.get_or_init(HttpFetcher::new) {
                Ok(h) => h.get(url, etag),
                Err(e) => Err(format!("cannot fetch {url}: {e}")),
            }
        }
        #[cfg(not(feature = "http"))]
        Err(format!("cannot fetch {url}: built without HTTP support"))
    }
}

impl Fetcher for SourceFetcher {
    fn fetch(&self, source: &ImportSource) -> Result<String, String> {
        body(self.get(&source.url, None)?, &source.url)
    }
}

/// Default cache location: `$LYPHFORGE_CACHE_DIR`, else
/// `$XDG_CACHE_HOME/lyphforge`, else `~/.cache/lyphforge`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_DIR_ENV) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return Path::new(&d).join("lyphforge");
    }
    let home = std::env::var_os("HOME").unwrap_or_else(|| ".".into());
    Path::new(&home).join(".cache").join("lyphforge")
}

#[derive(Serialize, Deserialize)]
struct Entry {
    url: String,
    etag: Option<String>,
    sha256: String,
}

/// Content-addressed on-disk cache in front of a [`Transport`].
///
/// Each location maps to an entry recording its last entity tag and the
/// digest of its content; contents are stored once per digest. With
/// [`CachePolicy::CacheOk`] a cached copy is used without contacting the
/// source. With [`CachePolicy::AlwaysFetch`] the source is asked again,
/// conditionally on the stored tag.
#[derive(Debug)]
pub struct CachedFetcher<T> {
    inner: T,
    dir: PathBuf,
}

impl<T: Transport> CachedFetcher<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> Self {
        CachedFetcher {
            inner,
            dir: dir.into(),
        }
    }

    fn entry_path(&self, url: &str) -> PathBuf {
        self.dir
            .join("entries")
            .join(format!("{}.json", digest(url.as_bytes())))
    }

    fn object_path(&self, sha: &str) -> PathBuf {
        self.dir.join("objects").join(sha)
    }

    fn lookup(&self, url: &str) -> Option<(Entry, String)> {
        let entry: Entry = serde_json::from_slice(&fs::read(self.entry_path(url)).ok()?).ok()?;
        let text = fs::read_to_string(self.object_path(&entry.sha256)).ok()?;
        (digest(text.as_bytes()) == entry.sha256 && entry.url == url).then_some((entry, text))
    }

    fn store(&self, url: &str, text: &str, etag: Option<String>) -> std::io::Result<()> {
        let sha = digest(text.as_bytes());
        fs::create_dir_all(self.dir.join("objects"))?;
        fs::create_dir_all(self.dir.join("entries"))?;
        fs::write(self.object_path(&sha), text)?;
        let entry = Entry {
            url: url.to_string(),
            etag,
            sha256: sha,
        };
        fs::write(
            self.entry_path(url),
            serde_json::to_vec_pretty(&entry).expect("serializable"),
        )
    }
}

impl<T: Transport> Fetcher for CachedFetcher<T> {
    fn fetch(&self, source: &ImportSource) -> Result<String, String> {
        let cached = self.lookup(&source.url);
        if source.cache_policy == CachePolicy::CacheOk {
            if let Some((_, text)) = cached {
                log::debug!("import {} served from cache", source.url);
                return Ok(text);
            }
        }
        let etag = cached.as_ref().and_then(|(e, _)| e.etag.as_deref());
        match self.inner.get(&source.url, etag)? {
            Reply::NotModified => match cached {
                Some((_, text)) => Ok(text),
                None => Err(format!("{}: not modified, but no cached copy", source.url)),
            },
            Reply::Body { text, etag } => {
                if let Err(e) = self.store(&source.url, &text, etag) {
                    log::warn!("cannot cache {}: {e}", source.url);
                }
                Ok(text)
            }
        }
    }
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    struct Counting {
        calls: Cell<usize>,
        etag: &'static str,
    }

    impl Transport for Counting {
        fn get(&self, _url: &str, etag: Option<&str>) -> Result<Reply, String> {
            self.calls.set(self.calls.get() + 1);
            if etag == Some(self.etag) {
                return Ok(Reply::NotModified);
            }
            Ok(Reply::Body {
                text: "{}".into(),
                etag: Some(self.etag.into()),
            })
        }
    }

    fn src(policy: CachePolicy) -> ImportSource {
        ImportSource {
            url: "https://example.org/m.json".into(),
            namespace: Some("m".into()),
            cache_policy: policy,
        }
    }

    #[test]
    fn cache_ok_skips_transport() {
        let dir = tempfile::tempdir().unwrap();
        let f = CachedFetcher::new(
            Counting {
                calls: Cell::new(0),
                etag: "v1",
            },
            dir.path(),
        );
        assert_eq!(f.fetch(&src(CachePolicy::CacheOk)).unwrap(), "{}");
        assert_eq!(f.fetch(&src(CachePolicy::CacheOk)).unwrap(), "{}");
        assert_eq!(f.inner.calls.get(), 1);
        // Revalidation hits the transport and accepts not-modified.
        assert_eq!(f.fetch(&src(CachePolicy::AlwaysFetch)).unwrap(), "{}");
        assert_eq!(f.inner.calls.get(), 2);
    }

    #[test]
    fn file_fetcher_reports_path() {
        let err = FileFetcher
            .fetch(&ImportSource::new("/nonexistent/x.json"))
            .unwrap_err();
        assert!(err.contains("/nonexistent/x.json"));
    }
}
