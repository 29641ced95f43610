//! Time-tagged detector clicks and their text format: one `channel<TAB>t_ps`
//! record per line, sorted by time, no header.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// XX-photon detector.
pub const CH_XX: u8 = 0;
/// X-photon detector behind the analyzer's transmitted port.
pub const CH_X_CO: u8 = 1;
/// X-photon detector behind the orthogonal port.
pub const CH_X_CROSS: u8 = 2;

pub const NUM_CHANNELS: usize = 3;

/// Clicks of one detector channel, timestamps in integer picoseconds.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventStream {
    channel: u8,
    timestamps: Vec<i64>,
}

impl EventStream {
    pub fn new(channel: u8, timestamps: Vec<i64>) -> Result<Self> {
        check_channel(channel)?;
        if let Some(i) = timestamps.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Unsorted {
                channel,
                index: i + 1,
            });
        }
        Ok(EventStream {
            channel,
            timestamps,
        })
    }

    /// Sorts the timestamps first.
    pub fn from_unsorted(channel: u8, mut timestamps: Vec<i64>) -> Result<Self> {
        timestamps.sort_unstable();
        Self::new(channel, timestamps)
    }

    pub fn empty(channel: u8) -> Self {
        EventStream {
            channel,
            timestamps: Vec::new(),
        }
    }

    pub fn channel(&self) -> u8 {
        self.channel
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Checks the ordering invariant.
    pub fn is_sorted(&self) -> bool {
        self.timestamps.windows(2).all(|w| w[0] <= w[1])
    }
}

fn check_channel(channel: u8) -> Result<()> {
    if (channel as usize) < NUM_CHANNELS {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("channel id {channel} not in 0..{NUM_CHANNELS}")))
    }
}

/// Writes all streams merged into one time-ordered record list (ties broken
/// by channel id).
pub fn write_events<W: Write>(mut w: W, streams: &[EventStream]) -> Result<()> {
    let mut cursors = vec![0usize; streams.len()];
    loop {
        let mut best: Option<(i64, u8, usize)> = None;
        for (k, s) in streams.iter().enumerate() {
            if let Some(&t) = s.timestamps.get(cursors[k]) {
                let key = (t, s.channel, k);
                if best.map_or(true, |b| (key.0, key.1) < (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
        match best {
            None => break,
            Some((t, ch, k)) => {
                writeln!(w, "{ch}\t{t}")?;
                cursors[k] += 1;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a record list into one stream per channel, indexed by channel id.
/// Records must be sorted by time.
pub fn read_events<R: BufRead>(r: R) -> Result<[EventStream; NUM_CHANNELS]> {
    let mut ts: [Vec<i64>; NUM_CHANNELS] = Default::default();
    let mut last = i64::MIN;
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            line: n + 1,
            msg: format!("{msg}: {line:?}"),
        };
        let (ch, t) = line
            .split_once('\t')
            .ok_or_else(|| bad("expected channel<TAB>t_ps"))?;
        let ch: u8 = ch.trim().parse().map_err(|_| bad("bad channel"))?;
        let t: i64 = t.trim().parse().map_err(|_| bad("bad timestamp"))?;
        if (ch as usize) >= NUM_CHANNELS {
            return Err(bad("channel out of range"));
        }
        if t < last {
            return Err(bad("records not sorted by time"));
        }
        last = t;
        ts[ch as usize].push(t);
    }
    let [a, b, c] = ts;
    Ok([
        EventStream::new(0, a)?,
        EventStream::new(1, b)?,
        EventStream::new(2, c)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_and_bad_channel() {
        assert!(matches!(
            EventStream::new(0, vec![1, 3, 2]),
            Err(Error::Unsorted { index: 2, .. })
        ));
        assert!(EventStream::new(3, vec![]).is_err());
        assert_eq!(EventStream::from_unsorted(1, vec![5, 1]).unwrap().timestamps(), &[1, 5]);
    }

    #[test]
    fn text_round_trip() {
        let s = [
            EventStream::new(0, vec![-5, 10, 10, 400]).unwrap(),
            EventStream::new(1, vec![10, 11]).unwrap(),
            EventStream::new(2, vec![]).unwrap(),
        ];
        let mut buf = Vec::new();
        write_events(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "0\t-5\n0\t10\n0\t10\n1\t10\n1\t11\n0\t400\n");
        let back = read_events(&buf[..]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn read_rejects_disorder() {
        assert!(read_events("0\t5\n1\t4\n".as_bytes()).is_err());
        assert!(read_events("0 5\n".as_bytes()).is_err());
        assert!(read_events("7\t5\n".as_bytes()).is_err());
    }
}
