//! Minimal RIFF/WAVE reader and writer for 16-bit PCM mono audio.

use std::path::Path;

use thiserror::Error;

use super::{SignalError, TimeSeries};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WavError {
    #[error("malformed WAV header: {0}")]
    Malformed(String),
    #[error("unsupported WAV encoding: {0}")]
    Unsupported(String),
}

const FORMAT_PCM: u16 = 1;

#[derive(Debug, Clone, Copy)]
struct Format {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

fn u16_at(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Decodes a PCM16 mono WAV image. Samples are scaled by 1/32768 into [-1, 1).
pub fn read_wav<T: Scalar>(id: &str, bytes: &[u8]) -> Result<TimeSeries<T>, SignalError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::Malformed("missing RIFF/WAVE signature".into()).into());
    }
    let mut format: Option<Format> = None;
    let mut data: Option<&[u8]> = None;
    let mut at = 12;
    while at + 8 <= bytes.len() {
        let chunk_id = &bytes[at..at + 4];
        let size = u32_at(bytes, at + 4) as usize;
        let body_start = at + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| {
                WavError::Malformed(format!(
                    "chunk `{}` declares {size} bytes past end of file",
                    String::from_utf8_lossy(chunk_id)
                ))
            })?;
        let body = &bytes[body_start..body_end];
        match chunk_id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(WavError::Malformed("fmt chunk shorter than 16 bytes".into()).into());
                }
                format = Some(Format {
                    tag: u16_at(body, 0),
                    channels: u16_at(body, 2),
                    sample_rate: u32_at(body, 4),
                    bits_per_sample: u16_at(body, 14),
                });
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunks are word aligned
        at = body_end + (size & 1);
    }

    let format = format.ok_or_else(|| WavError::Malformed("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| WavError::Malformed("no data chunk".into()))?;
    if format.tag != FORMAT_PCM {
        return Err(WavError::Unsupported(format!("format tag {} is not PCM", format.tag)).into());
    }
    if format.channels != 1 {
        return Err(WavError::Unsupported(format!("{} channels, only mono is supported", format.channels)).into());
    }
    if format.bits_per_sample != 16 {
        return Err(WavError::Unsupported(format!("{} bits per sample, only 16 is supported", format.bits_per_sample)).into());
    }
    if format.sample_rate == 0 {
        return Err(WavError::Malformed("sample rate is zero".into()).into());
    }
    if data.len() % 2 != 0 {
        return Err(WavError::Malformed("data chunk has an odd byte count".into()).into());
    }

    let scale = T::of(32768.0);
    let samples = data
        .chunks_exact(2)
        .map(|pair| T::of(f64::from(i16::from_le_bytes([pair[0], pair[1]]))) / scale)
        .collect();
    TimeSeries::new(id, samples, format.sample_rate)
}

/// Reads a WAV file; the series id is the file stem.
pub fn load_wav<T: Scalar>(path: impl AsRef<Path>) -> Result<TimeSeries<T>, SignalError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_wav(&id, &bytes)
}

/// Encodes raw PCM16 samples as a mono WAV image.
pub fn write_wav_pcm16(samples: &[i16], sample_rate: u32) -> Vec<u8> {
    let data_len = (samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + samples.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wav_error(result: Result<TimeSeries<f64>, SignalError>) -> WavError {
        match result {
            Err(SignalError::Wav(e)) => e,
            other => panic!("expected WAV error, got {other:?}"),
        }
    }

    #[test]
    fn normalizes_pcm16() {
        let bytes = write_wav_pcm16(&[0, 16384, -32768], 22050);
        let series: TimeSeries<f64> = read_wav("x", &bytes).unwrap();
        assert_eq!(series.samples(), &[0.0, 0.5, -1.0]);
        assert_eq!(series.sample_rate(), 22050);
    }

    #[test]
    fn keeps_length_and_rate_for_both_corpus_rates() {
        for rate in [22050, 16000] {
            let samples: Vec<i16> = (0..1234).map(|i| (i * 7 % 300) as i16 - 150).collect();
            let series: TimeSeries<f32> = read_wav("x", &write_wav_pcm16(&samples, rate)).unwrap();
            assert_eq!(series.len(), 1234);
            assert_eq!(series.sample_rate(), rate);
        }
    }

    #[test]
    fn stereo_is_unsupported() {
        let mut bytes = write_wav_pcm16(&[1, 2, 3, 4], 16000);
        bytes[22] = 2;
        assert!(matches!(wav_error(read_wav("x", &bytes)), WavError::Unsupported(_)));
    }

    #[test]
    fn non_pcm_and_other_depths_are_unsupported() {
        let mut float = write_wav_pcm16(&[1, 2], 16000);
        float[20] = 3;
        assert!(matches!(wav_error(read_wav("x", &float)), WavError::Unsupported(_)));
        let mut eight_bit = write_wav_pcm16(&[1, 2], 16000);
        eight_bit[34] = 8;
        assert!(matches!(wav_error(read_wav("x", &eight_bit)), WavError::Unsupported(_)));
    }

    #[test]
    fn malformed_headers() {
        assert!(matches!(wav_error(read_wav("x", b"RIFX....WAVE")), WavError::Malformed(_)));
        let bytes = write_wav_pcm16(&[1, 2, 3], 16000);
        assert!(matches!(wav_error(read_wav("x", &bytes[..bytes.len() - 2])), WavError::Malformed(_)));
        assert!(matches!(wav_error(read_wav("x", &bytes[..36])), WavError::Malformed(_)));
    }

    #[test]
    fn skips_unknown_chunks() {
        let plain = write_wav_pcm16(&[5, -5], 16000);
        let mut with_list = plain[..36].to_vec();
        with_list.extend_from_slice(b"LIST");
        with_list.extend_from_slice(&3u32.to_le_bytes());
        with_list.extend_from_slice(&[1, 2, 3, 0]);
        with_list.extend_from_slice(&plain[36..]);
        let series: TimeSeries<f64> = read_wav("x", &with_list).unwrap();
        assert_eq!(series.len(), 2);
    }
}
