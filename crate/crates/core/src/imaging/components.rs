use super::mask::BinaryMask;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn from_count(n: u8) -> Option<Self> {
        match n {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }
}

/// Region ids per pixel (0 = background) and pixel counts per id.
///
/// Ids are `1..=K` in raster order of each region's first pixel;
/// `region_sizes[k]` holds the size of region `k` and `region_sizes[0]`
/// is the background count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledRegions {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub region_sizes: Vec<usize>,
}

impl LabeledRegions {
    pub fn num_regions(&self) -> usize {
        self.region_sizes.len() - 1
    }

    pub fn region_mask(&self, id: u32) -> BinaryMask {
        BinaryMask::from_bits(
            self.width,
            self.height,
            self.labels.iter().map(|&l| l == id).collect(),
        )
        .expect("labels match dims")
    }

    /// Raster index of the first pixel of each region, indexed by `id - 1`.
    pub fn seeds(&self) -> Vec<usize> {
        let mut seeds = vec![usize::MAX; self.num_regions()];
        for (i, &l) in self.labels.iter().enumerate() {
            if l > 0 && seeds[l as usize - 1] == usize::MAX {
                seeds[l as usize - 1] = i;
            }
        }
        seeds
    }
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        let p = parent[i as usize];
        parent[i as usize] = parent[p as usize];
        i = p;
    }
    i
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // keep the smaller provisional label as root
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Two-pass union-find labeling.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> LabeledRegions {
    let (w, h) = mask.dims();
    let mut provisional = vec![0u32; w * h];
    let mut parent: Vec<u32> = vec![0];

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let mut neighbours = [0u32; 4];
            let mut n = 0;
            let mut push = |l: u32| {
                if l != 0 {
                    neighbours[n] = l;
                    n += 1;
                }
            };
            if x > 0 {
                push(provisional[y * w + x - 1]);
            }
            if y > 0 {
                push(provisional[(y - 1) * w + x]);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        push(provisional[(y - 1) * w + x - 1]);
                    }
                    if x + 1 < w {
                        push(provisional[(y - 1) * w + x + 1]);
                    }
                }
            }
            let label = if n == 0 {
                let l = parent.len() as u32;
                parent.push(l);
                l
            } else {
                let l = *neighbours[..n].iter().min().unwrap();
                for &other in &neighbours[..n] {
                    union(&mut parent, l, other);
                }
                l
            };
            provisional[y * w + x] = label;
        }
    }

    let mut remap = vec![0u32; parent.len()];
    let mut labels = vec![0u32; w * h];
    let mut region_sizes = vec![0usize];
    for (i, &p) in provisional.iter().enumerate() {
        if p == 0 {
            region_sizes[0] += 1;
            continue;
        }
        let root = find(&mut parent, p) as usize;
        if remap[root] == 0 {
            remap[root] = region_sizes.len() as u32;
            region_sizes.push(0);
        }
        let id = remap[root];
        labels[i] = id;
        region_sizes[id as usize] += 1;
    }

    LabeledRegions {
        width: w,
        height: h,
        labels,
        region_sizes,
    }
}
