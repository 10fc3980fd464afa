//! Grayscale image reconstruction from intensity measurements.
//!
//! A PGM image becomes the ground-truth signal: pixel values are scaled to
//! [0, 1] by the header maximum and the vectorized image is L2-normalized.
//! Quadratic measurements are simulated from it, each requested method
//! reconstructs the signal, estimates are sign-aligned to the truth, and
//! the recovered images are written back as PGM.

use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{self, mre, Method, RunBudget};
use crate::model::{self, dot};
use crate::rng::{derive_stream, RngState};

/// Reconstructions above this dimension are refused unless explicitly
/// allowed; full chains at larger sizes stop being a desk-scale run.
pub const SIZE_GUARD: usize = 100_000;

/// A grayscale image interpreted as a signal vector in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSignal {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
    /// Fraction of nonzero pixels.
    pub nnz_fraction: f64,
}

impl ImageSignal {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimension);
        }
        if pixels.len() != width * height {
            return Err(Error::ShapeMismatch { expected: width * height, got: pixels.len() });
        }
        let nnz = pixels.iter().filter(|&&x| x != 0.0).count();
        let nnz_fraction = nnz as f64 / pixels.len() as f64;
        Ok(Self { width, height, pixels, nnz_fraction })
    }

    pub fn dim(&self) -> usize {
        self.pixels.len()
    }
}

/// Reads an ASCII (`P2`) or binary (`P5`) PGM, scales pixels to [0, 1] by
/// the header maximum and L2-normalizes the result.
pub fn load_pgm(path: &Path) -> Result<ImageSignal> {
    let bytes = std::fs::read(path)?;
    let mut cur = Cursor { bytes: &bytes, pos: 0 };

    let magic = cur.token()?;
    let binary = match magic.text.as_str() {
        "P2" => false,
        "P5" => true,
        other => {
            return Err(Error::PgmParse {
                offset: magic.offset,
                msg: format!("expected magic P2 or P5, found {other:?}"),
            })
        }
    };
    let width = cur.number()? as usize;
    let height = cur.number()? as usize;
    if width == 0 || height == 0 {
        return Err(Error::PgmParse {
            offset: cur.pos,
            msg: "image dimensions must be positive".into(),
        });
    }
    let maxval_tok = cur.token()?;
    let maxval: u32 = maxval_tok.text.parse().map_err(|_| Error::PgmParse {
        offset: maxval_tok.offset,
        msg: format!("invalid maximum gray value {:?}", maxval_tok.text),
    })?;
    if maxval == 0 || maxval > 65_535 {
        return Err(Error::PgmParse {
            offset: maxval_tok.offset,
            msg: format!("maximum gray value {maxval} outside 1..=65535"),
        });
    }

    let n = width * height;
    let mut raw = Vec::with_capacity(n);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        cur.expect_single_whitespace()?;
        let bytes_per = if maxval < 256 { 1 } else { 2 };
        let need = n * bytes_per;
        if cur.bytes.len() - cur.pos < need {
            return Err(Error::PgmParse {
                offset: cur.bytes.len(),
                msg: format!(
                    "truncated raster: expected {need} bytes, found {}",
                    cur.bytes.len() - cur.pos
                ),
            });
        }
        for i in 0..n {
            let at = cur.pos + i * bytes_per;
            let v = if bytes_per == 1 {
                cur.bytes[at] as u32
            } else {
                ((cur.bytes[at] as u32) << 8) | cur.bytes[at + 1] as u32
            };
            raw.push(v);
        }
    } else {
        for _ in 0..n {
            raw.push(cur.number()?);
        }
    }
    for (i, &v) in raw.iter().enumerate() {
        if v > maxval {
            return Err(Error::PgmParse {
                offset: cur.pos,
                msg: format!("pixel {i} has value {v} above the maximum {maxval}"),
            });
        }
    }

    let mut pixels: Vec<f64> = raw.iter().map(|&v| v as f64 / maxval as f64).collect();
    let norm = dot(&pixels, &pixels).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidConfig("cannot normalize an all-zero image".into()));
    }
    for x in pixels.iter_mut() {
        *x /= norm;
    }
    ImageSignal::new(width, height, pixels)
}

struct Token {
    text: String,
    offset: usize,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Next whitespace-delimited token, skipping `#` comments.
    fn token(&mut self) -> Result<Token> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.bytes.len() {
            return Err(Error::PgmParse { offset: self.pos, msg: "unexpected end of file".into() });
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::PgmParse { offset: start, msg: "non-ASCII header token".into() })?
            .to_string();
        Ok(Token { text, offset: start })
    }

    fn number(&mut self) -> Result<u32> {
        let tok = self.token()?;
        tok.text.parse().map_err(|_| Error::PgmParse {
            offset: tok.offset,
            msg: format!("expected an unsigned integer, found {:?}", tok.text),
        })
    }

    fn expect_single_whitespace(&mut self) -> Result<()> {
        if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_whitespace() {
            return Err(Error::PgmParse {
                offset: self.pos,
                msg: "expected a whitespace byte before the binary raster".into(),
            });
        }
        self.pos += 1;
        Ok(())
    }
}

/// Writes an ASCII `P2` PGM at maximum gray value 255, mapping pixel
/// values affinely from `[min, max]` onto `0..=255`. A constant image maps
/// to all zeros.
pub fn save_pgm(img: &ImageSignal, path: &Path) -> Result<()> {
    if img.pixels.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig("cannot save non-finite pixels".into()));
    }
    let min = img.pixels.iter().copied().fold(f64::INFINITY, f64::min);
    let max = img.pixels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let mut out = format!("P2\n{} {}\n255\n", img.width, img.height);
    for row in img.pixels.chunks(img.width) {
        let mut line = String::new();
        for (i, &x) in row.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            let v = if range > 0.0 { ((x - min) / range * 255.0).round() as u32 } else { 0 };
            line.push_str(&v.to_string());
        }
        out.push_str(&line);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Measurement design and method roster for [`reconstruct_image`].
#[derive(Debug, Clone)]
pub struct ReconstructConfig {
    pub m: usize,
    pub sigma: f64,
    pub methods: Vec<Method>,
    pub seed: u64,
    /// Prior scale for the samplers.
    pub varsigma: f64,
    /// Inverse temperature as a multiple of `m`.
    pub lambda_times_m: f64,
    pub budget: RunBudget,
    /// Lifts the [`SIZE_GUARD`] limit.
    pub allow_large: bool,
}

impl ReconstructConfig {
    /// Harness defaults: 4000 measurements, unit noise, all methods,
    /// prior scale 0.1 and inverse temperature 4m.
    pub fn new(seed: u64) -> Self {
        Self {
            m: 4_000,
            sigma: 1.0,
            methods: Method::ALL.to_vec(),
            seed,
            varsigma: 0.1,
            lambda_times_m: 4.0,
            budget: RunBudget::default(),
            allow_large: false,
        }
    }
}

/// One method's recovered image together with its error.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub method: Method,
    /// Sign-aligned estimate reshaped to the image grid, negatives clamped
    /// to zero for display.
    pub image: ImageSignal,
    /// Error of the raw (unclamped) estimate against the ground truth.
    pub mre: f64,
    pub acceptance_rate: Option<f64>,
}

/// Simulates `m` intensity measurements of the vectorized image and
/// reconstructs it with each requested method.
pub fn reconstruct_image(
    img: &ImageSignal,
    cfg: &ReconstructConfig,
) -> Result<Vec<Reconstruction>> {
    let p = img.dim();
    if p > SIZE_GUARD && !cfg.allow_large {
        return Err(Error::SizeGuard { p, limit: SIZE_GUARD });
    }
    if cfg.methods.is_empty() {
        return Ok(Vec::new());
    }
    let theta_star = &img.pixels;
    let mut inst_rng = RngState::new(cfg.seed, derive_stream(0, 0, experiments::SLOT_INSTANCE));
    let inst = model::generate_instance(&mut inst_rng, theta_star, cfg.m, cfg.sigma)?;
    let lambda = cfg.lambda_times_m * cfg.m as f64;

    let outcomes = experiments::run_methods_ordered(
        &inst,
        cfg.varsigma,
        lambda,
        &cfg.budget,
        cfg.seed,
        0,
        0,
        &cfg.methods,
    );

    let mut out = Vec::with_capacity(outcomes.len());
    for (method, outcome, _) in outcomes {
        let o = outcome?;
        let mut estimate = o.estimate;
        if dot(&estimate, theta_star) < 0.0 {
            for x in estimate.iter_mut() {
                *x = -*x;
            }
        }
        let err = mre(&estimate, theta_star)?;
        let display: Vec<f64> = estimate.iter().map(|&x| x.max(0.0)).collect();
        out.push(Reconstruction {
            method,
            image: ImageSignal::new(img.width, img.height, display)?,
            mre: err,
            acceptance_rate: o.acceptance_rate,
        });
    }
    Ok(out)
}
