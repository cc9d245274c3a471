//! MNIST IDX ingestion, class filtering, resizing and seeded splits.

use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{QaeError, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const SIDE: usize = 28;
pub const PIXELS: usize = SIDE * SIDE;
pub const SMALL_SIDE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageSample {
    pub pixels: Vec<u8>,
    pub label: u8,
}

impl ImageSample {
    pub fn new(pixels: Vec<u8>, label: u8) -> Result<Self> {
        if pixels.len() != PIXELS {
            return Err(QaeError::DimensionMismatch {
                expected: PIXELS,
                got: pixels.len(),
            });
        }
        if label > 9 {
            return Err(QaeError::Data(format!("label {label} out of range")));
        }
        Ok(Self { pixels, label })
    }

    pub fn is_blank(&self) -> bool {
        self.pixels.iter().all(|&p| p == 0)
    }
}

fn read_u32(bytes: &[u8], at: usize, path: &str, what: &str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| QaeError::Truncated {
            path: path.into(),
            detail: format!("missing {what}"),
        })
}

fn check_magic(bytes: &[u8], expected: u32, path: &str) -> Result<()> {
    let found = read_u32(bytes, 0, path, "magic number")?;
    if found != expected {
        return Err(QaeError::WrongMagic {
            path: path.into(),
            expected,
            found,
        });
    }
    Ok(())
}

/// Parses an IDX image file (`0x00000803`, count, rows, cols, pixels).
pub fn parse_images(bytes: &[u8], path: &str) -> Result<Vec<Vec<u8>>> {
    check_magic(bytes, IMAGE_MAGIC, path)?;
    let count = read_u32(bytes, 4, path, "image count")? as usize;
    let rows = read_u32(bytes, 8, path, "row count")? as usize;
    let cols = read_u32(bytes, 12, path, "column count")? as usize;
    if rows != SIDE || cols != SIDE {
        return Err(QaeError::Data(format!("{path}: expected {SIDE}x{SIDE} images, found {rows}x{cols}")));
    }
    let body = &bytes[16..];
    if body.len() < count * PIXELS {
        return Err(QaeError::Truncated {
            path: path.into(),
            detail: format!("{count} images need {} bytes, found {}", count * PIXELS, body.len()),
        });
    }
    Ok(body[..count * PIXELS].chunks_exact(PIXELS).map(<[u8]>::to_vec).collect())
}

/// Parses an IDX label file (`0x00000801`, count, labels).
pub fn parse_labels(bytes: &[u8], path: &str) -> Result<Vec<u8>> {
    check_magic(bytes, LABEL_MAGIC, path)?;
    let count = read_u32(bytes, 4, path, "label count")? as usize;
    let body = &bytes[8..];
    if body.len() < count {
        return Err(QaeError::Truncated {
            path: path.into(),
            detail: format!("{count} labels declared, {} present", body.len()),
        });
    }
    Ok(body[..count].to_vec())
}

/// Loads paired image and label files.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Vec<ImageSample>> {
    let ip = images_path.display().to_string();
    let lp = labels_path.display().to_string();
    let images = parse_images(&fs::read(images_path)?, &ip)?;
    let labels = parse_labels(&fs::read(labels_path)?, &lp)?;
    if images.len() != labels.len() {
        return Err(QaeError::CountMismatch {
            images: images.len(),
            labels: labels.len(),
        });
    }
    images
        .into_iter()
        .zip(labels)
        .map(|(p, l)| ImageSample::new(p, l))
        .collect()
}

/// IDX byte streams `(images, labels)` for `samples`.
pub fn encode_idx(samples: &[ImageSample]) -> (Vec<u8>, Vec<u8>) {
    let n = samples.len() as u32;
    let mut images = Vec::with_capacity(16 + samples.len() * PIXELS);
    for v in [IMAGE_MAGIC, n, SIDE as u32, SIDE as u32] {
        images.extend_from_slice(&v.to_be_bytes());
    }
    let mut labels = Vec::with_capacity(8 + samples.len());
    labels.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    labels.extend_from_slice(&n.to_be_bytes());
    for s in samples {
        images.extend_from_slice(&s.pixels);
        labels.push(s.label);
    }
    (images, labels)
}

pub fn write_idx(samples: &[ImageSample], images_path: &Path, labels_path: &Path) -> Result<()> {
    let (images, labels) = encode_idx(samples);
    fs::write(images_path, images)?;
    fs::write(labels_path, labels)?;
    Ok(())
}

/// Order-preserving filter on labels.
pub fn filter_classes(samples: &[ImageSample], classes: &[u8]) -> Vec<ImageSample> {
    samples.iter().filter(|s| classes.contains(&s.label)).cloned().collect()
}

/// Bilinear resize to 16×16 (pixel-centre aligned), scaled to `[0, 1]`,
/// row-major.
pub fn resize16(img: &ImageSample) -> Vec<f64> {
    let scale = SIDE as f64 / SMALL_SIDE as f64;
    let px = |r: usize, c: usize| img.pixels[r * SIDE + c] as f64;
    let coord = |i: usize| {
        let x = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (SIDE - 1) as f64);
        let lo = x.floor() as usize;
        let hi = (lo + 1).min(SIDE - 1);
        (lo, hi, x - lo as f64)
    };
    let mut out = Vec::with_capacity(SMALL_SIDE * SMALL_SIDE);
    for i in 0..SMALL_SIDE {
        let (r0, r1, fr) = coord(i);
        for j in 0..SMALL_SIDE {
            let (c0, c1, fc) = coord(j);
            let top = px(r0, c0) * (1.0 - fc) + px(r0, c1) * fc;
            let bottom = px(r1, c0) * (1.0 - fc) + px(r1, c1) * fc;
            out.push(((top * (1.0 - fr) + bottom * fr) / 255.0).clamp(0.0, 1.0));
        }
    }
    out
}

/// Flattened pixels scaled to `[0, 1]`.
pub fn normalized_pixels(img: &ImageSample) -> Vec<f64> {
    img.pixels.iter().map(|&p| p as f64 / 255.0).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub classes: Vec<u8>,
    pub test_count: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            classes: vec![0, 1],
            test_count: 400,
            seed: 0,
        }
    }
}

/// Training set = filtered official train split; evaluation set = seeded
/// draw of `test_count` from the filtered official test split, in draw order.
pub fn make_split(
    train: &[ImageSample],
    test: &[ImageSample],
    spec: &SplitSpec,
) -> Result<(Vec<ImageSample>, Vec<ImageSample>)> {
    if spec.classes.is_empty() {
        return Err(QaeError::Data("split needs at least one class".into()));
    }
    let train = filter_classes(train, &spec.classes);
    let pool = filter_classes(test, &spec.classes);
    if spec.test_count > pool.len() {
        return Err(QaeError::Data(format!(
            "requested {} test samples but only {} match classes {:?}",
            spec.test_count,
            pool.len(),
            spec.classes
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let eval = sample(&mut rng, pool.len(), spec.test_count)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect();
    Ok((train, eval))
}

/// Drops all-zero images, returning the kept samples and the dropped count.
pub fn drop_blank(samples: Vec<ImageSample>) -> (Vec<ImageSample>, usize) {
    let before = samples.len();
    let kept: Vec<_> = samples.into_iter().filter(|s| !s.is_blank()).collect();
    let dropped = before - kept.len();
    if dropped > 0 {
        log::info!("dropped {dropped} blank images");
    }
    (kept, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(n: usize) -> Vec<ImageSample> {
        (0..n)
            .map(|k| {
                let pixels = (0..PIXELS).map(|i| ((i * 31 + k * 17) % 256) as u8).collect();
                ImageSample::new(pixels, (k % 10) as u8).unwrap()
            })
            .collect()
    }

    #[test]
    fn idx_round_trip_is_byte_exact() {
        let samples = fixture(100);
        let (img, lab) = encode_idx(&samples);
        let dir = tempfile::tempdir().unwrap();
        let (ip, lp) = (dir.path().join("i"), dir.path().join("l"));
        fs::write(&ip, &img).unwrap();
        fs::write(&lp, &lab).unwrap();
        let back = load_idx(&ip, &lp).unwrap();
        assert_eq!(back, samples);
        write_idx(&back, &ip, &lp).unwrap();
        assert_eq!(fs::read(&ip).unwrap(), img);
        assert_eq!(fs::read(&lp).unwrap(), lab);
    }

    #[test]
    fn distinct_parse_errors() {
        let (mut img, lab) = encode_idx(&fixture(3));
        let mut bad = img.clone();
        bad[3] = 0x02;
        assert!(matches!(parse_images(&bad, "x"), Err(QaeError::WrongMagic { found: 0x802, .. })));
        img.truncate(16 + PIXELS * 2);
        assert!(matches!(parse_images(&img, "x"), Err(QaeError::Truncated { .. })));
        assert!(matches!(parse_labels(&lab[..9], "x"), Err(QaeError::Truncated { .. })));

        let dir = tempfile::tempdir().unwrap();
        let (img, _) = encode_idx(&fixture(3));
        let (_, lab) = encode_idx(&fixture(2));
        let (ip, lp) = (dir.path().join("i"), dir.path().join("l"));
        fs::write(&ip, img).unwrap();
        fs::write(&lp, lab).unwrap();
        assert!(matches!(
            load_idx(&ip, &lp),
            Err(QaeError::CountMismatch { images: 3, labels: 2 })
        ));
    }

    #[test]
    fn filter_examples() {
        let s = fixture(30);
        let f = filter_classes(&s, &[0, 1]);
        assert!(f.iter().all(|x| x.label <= 1));
        assert_eq!(f.len(), 6);
        assert!(filter_classes(&s[..5], &[9]).is_empty());
        assert_eq!(filter_classes(&s, &(0..10).collect::<Vec<_>>()), s);
    }

    #[test]
    fn resize_constant_and_blank() {
        let img = ImageSample::new(vec![51; PIXELS], 3).unwrap();
        let r = resize16(&img);
        assert_eq!(r.len(), 256);
        assert!(r.iter().all(|&v| (v - 0.2).abs() < 1e-12));
        let blank = ImageSample::new(vec![0; PIXELS], 0).unwrap();
        assert!(resize16(&blank).iter().all(|&v| v == 0.0));
        assert!(crate::encoding::amplitude_encode(&resize16(&blank)).is_err());
        let (kept, dropped) = drop_blank(vec![blank, img]);
        assert_eq!((kept.len(), dropped), (1, 1));
    }

    #[test]
    fn resize_in_unit_range() {
        for s in fixture(5) {
            assert!(resize16(&s).iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn split_is_seeded() {
        let train = fixture(50);
        let test = fixture(40);
        let spec = SplitSpec {
            classes: vec![0, 1],
            test_count: 5,
            seed: 4,
        };
        let (t, e) = make_split(&train, &test, &spec).unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(e.len(), 5);
        assert_eq!(make_split(&train, &test, &spec).unwrap().1, e);
        let too_many = SplitSpec { test_count: 9, ..spec };
        assert!(make_split(&train, &test, &too_many).is_err());
    }
}
