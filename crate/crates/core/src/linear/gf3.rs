//! Bit-sliced vectors over GF(3): bit `i` of `ones` is set when coordinate
//! `i` equals 1, bit `i` of `twos` when it equals 2.

/// Longest supported vector.
pub const MAX_LEN: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec3 {
    pub(crate) ones: u64,
    pub(crate) twos: u64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { ones: 0, twos: 0 };

    pub fn from_digits(digits: &[u8]) -> Self {
        let mut v = Vec3::ZERO;
        for (i, &d) in digits.iter().enumerate() {
            match d % 3 {
                1 => v.ones |= 1 << i,
                2 => v.twos |= 1 << i,
                _ => {}
            }
        }
        v
    }

    pub fn digits(&self, len: usize) -> Vec<u8> {
        (0..len).map(|i| self.get(i)).collect()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        (self.ones >> i & 1) as u8 | ((self.twos >> i & 1) as u8) << 1
    }

    #[inline]
    pub fn add(self, o: Vec3) -> Vec3 {
        let t = (self.ones | o.twos) ^ (self.twos | o.ones);
        Vec3 {
            ones: (self.twos | o.twos) ^ t,
            twos: (self.ones | o.ones) ^ t,
        }
    }

    #[inline]
    pub fn neg(self) -> Vec3 {
        Vec3 {
            ones: self.twos,
            twos: self.ones,
        }
    }

    #[inline]
    pub fn scale(self, s: u8) -> Vec3 {
        match s % 3 {
            0 => Vec3::ZERO,
            1 => self,
            _ => self.neg(),
        }
    }

    #[inline]
    pub fn support(&self) -> u64 {
        self.ones | self.twos
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.support() == 0
    }

    /// Dot product mod 3.
    pub fn dot(&self, o: &Vec3) -> u8 {
        let same = (self.ones & o.ones) | (self.twos & o.twos);
        let cross = (self.ones & o.twos) | (self.twos & o.ones);
        ((same.count_ones() + 2 * cross.count_ones()) % 3) as u8
    }

    /// The scalar multiple whose first nonzero coordinate is 1.
    pub fn normalized(self) -> Vec3 {
        let s = self.support();
        if s == 0 {
            return self;
        }
        if self.twos >> s.trailing_zeros() & 1 == 1 {
            self.neg()
        } else {
            self
        }
    }
}

/// Rank over GF(3) by Gaussian elimination.
pub fn rank(vectors: &[Vec3]) -> usize {
    let mut rows: Vec<Vec3> = vectors.to_vec();
    let mut r = 0;
    for bit in 0..MAX_LEN {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].support() >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        // Pivot entry 2 is its own inverse, so scaling by it makes it 1.
        let pivot = rows[r].scale(rows[r].get(bit));
        rows[r] = pivot;
        for i in 0..rows.len() {
            if i != r {
                let c = rows[i].get(bit);
                if c != 0 {
                    rows[i] = rows[i].add(pivot.scale(3 - c));
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}
