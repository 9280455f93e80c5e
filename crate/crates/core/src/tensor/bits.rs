//! Packed bit arrays over `u64` words, least significant bit first.
//!
//! Bits beyond `len` in the final word are always zero.

pub const WORD_BITS: usize = 64;

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        b.mask_tail();
        b
    }

    /// Takes ownership of `words`; any padding bits are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut b = Self { len, words };
        b.mask_tail();
        b
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut words = vec![0u64; words_for(len)];
        for (w, word) in words.iter_mut().enumerate() {
            let base = w * WORD_BITS;
            let n = WORD_BITS.min(len - base);
            let mut acc = 0u64;
            for b in 0..n {
                acc |= (f(base + b) as u64) << b;
            }
            *word = acc;
        }
        Self { len, words }
    }

    pub(crate) fn mask_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(rem);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// True if every padding bit is zero.
    pub fn padding_is_clear(&self) -> bool {
        if self.words.len() != words_for(self.len) {
            return false;
        }
        let rem = self.len % WORD_BITS;
        rem == 0 || self.words.last().is_none_or(|w| w & !low_mask(rem) == 0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// The 64 bits starting at bit `offset`; positions past the end read as zero.
    #[inline]
    pub fn word_at(&self, offset: usize) -> u64 {
        let w = offset / WORD_BITS;
        let s = offset % WORD_BITS;
        let lo = self.words.get(w).copied().unwrap_or(0);
        if s == 0 {
            lo
        } else {
            let hi = self.words.get(w + 1).copied().unwrap_or(0);
            (lo >> s) | (hi << (WORD_BITS - s))
        }
    }

    pub fn count_ones_in(&self, start: usize, end: usize) -> u64 {
        let mut total = 0;
        let mut pos = start;
        while pos < end {
            let n = WORD_BITS.min(end - pos);
            total += (self.word_at(pos) & low_mask(n)).count_ones() as u64;
            pos += n;
        }
        total
    }

    pub fn any_in(&self, start: usize, end: usize) -> bool {
        let mut pos = start;
        while pos < end {
            let n = WORD_BITS.min(end - pos);
            if self.word_at(pos) & low_mask(n) != 0 {
                return true;
            }
            pos += n;
        }
        false
    }

    pub fn all_in(&self, start: usize, end: usize) -> bool {
        let mut pos = start;
        while pos < end {
            let n = WORD_BITS.min(end - pos);
            let m = low_mask(n);
            if self.word_at(pos) & m != m {
                return false;
            }
            pos += n;
        }
        true
    }

    /// ORs `len` bits of `src` starting at `src_off` into `self` at `dst_off`.
    pub fn or_range_from(&mut self, dst_off: usize, src: &Bits, src_off: usize, len: usize) {
        debug_assert!(dst_off + len <= self.len && src_off + len <= src.len);
        let mut done = 0;
        while done < len {
            let dst = dst_off + done;
            let shift = dst % WORD_BITS;
            let n = (WORD_BITS - shift).min(len - done);
            let chunk = src.word_at(src_off + done) & low_mask(n);
            self.words[dst / WORD_BITS] |= chunk << shift;
            done += n;
        }
    }

    pub fn fill_ones(&mut self, off: usize, len: usize) {
        debug_assert!(off + len <= self.len);
        let mut done = 0;
        while done < len {
            let dst = off + done;
            let shift = dst % WORD_BITS;
            let n = (WORD_BITS - shift).min(len - done);
            self.words[dst / WORD_BITS] |= low_mask(n) << shift;
            done += n;
        }
    }

    pub fn and_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn or_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn not_assign(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.mask_tail();
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> Ones<'_> {
        self.iter_ones_in(0, self.len)
    }

    /// Indices of set bits within `start..end`, in increasing order.
    pub fn iter_ones_in(&self, start: usize, end: usize) -> Ones<'_> {
        let end = end.min(self.len);
        let start = start.min(end);
        let word = start / WORD_BITS;
        let current = if start < end {
            self.words[word] & !low_mask(start % WORD_BITS)
        } else {
            0
        };
        Ones {
            words: &self.words,
            word,
            current,
            end,
        }
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word: usize,
    current: u64,
    end: usize,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let idx = self.word * WORD_BITS + self.current.trailing_zeros() as usize;
                if idx >= self.end {
                    self.current = 0;
                    return None;
                }
                self.current &= self.current - 1;
                return Some(idx);
            }
            self.word += 1;
            if self.word * WORD_BITS >= self.end {
                return None;
            }
            self.current = self.words[self.word];
        }
    }
}
