//! Betti numbers of binary masks and the derived topology errors.
//! Connectivity convention: 8-connected foreground, 4-connected
//! background (digital-topology duality).

/// (β0, β1): 8-connected foreground components and 4-connected
/// background components fully enclosed by foreground.
pub fn betti(bin: &[bool], w: usize, h: usize) -> (usize, usize) {
    assert_eq!(bin.len(), w * h);
    let b0 = count_components(bin, w, h, true, true);
    // Background components touching the border are not holes.
    let mut visited = vec![false; w * h];
    // Flood the border-connected background first.
    let mut stack: Vec<usize> = Vec::new();
    for x in 0..w {
        for y in [0, h - 1] {
            let i = y * w + x;
            if !bin[i] && !visited[i] {
                visited[i] = true;
                stack.push(i);
            }
        }
    }
    for y in 0..h {
        for x in [0, w - 1] {
            let i = y * w + x;
            if !bin[i] && !visited[i] {
                visited[i] = true;
                stack.push(i);
            }
        }
    }
    flood4(bin, w, h, &mut visited, &mut stack);
    let mut b1 = 0;
    for i in 0..w * h {
        if !bin[i] && !visited[i] {
            b1 += 1;
            visited[i] = true;
            stack.push(i);
            flood4(bin, w, h, &mut visited, &mut stack);
        }
    }
    (b0, b1)
}

fn flood4(bin: &[bool], w: usize, h: usize, visited: &mut [bool], stack: &mut Vec<usize>) {
    while let Some(i) = stack.pop() {
        let (x, y) = (i % w, i / w);
        let mut push = |j: usize| {
            if !bin[j] && !visited[j] {
                visited[j] = true;
                stack.push(j);
            }
        };
        if x > 0 {
            push(i - 1);
        }
        if x + 1 < w {
            push(i + 1);
        }
        if y > 0 {
            push(i - w);
        }
        if y + 1 < h {
            push(i + w);
        }
    }
}

fn count_components(bin: &[bool], w: usize, h: usize, value: bool, eight: bool) -> usize {
    let mut visited = vec![false; w * h];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if bin[start] != value || visited[start] {
            continue;
        }
        count += 1;
        visited[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    if !eight && dx != 0 && dy != 0 {
                        continue;
                    }
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if bin[j] == value && !visited[j] {
                        visited[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    count
}

/// Euler characteristic χ = β0 - β1.
pub fn euler_characteristic(bin: &[bool], w: usize, h: usize) -> i64 {
    let (b0, b1) = betti(bin, w, h);
    b0 as i64 - b1 as i64
}

/// |χ(A) - χ(B)|
pub fn chi_err(a: &[bool], b: &[bool], w: usize, h: usize) -> u64 {
    (euler_characteristic(a, w, h) - euler_characteristic(b, w, h)).unsigned_abs()
}

/// |β0(A) - β0(B)| + |β1(A) - β1(B)|
pub fn beta_err(a: &[bool], b: &[bool], w: usize, h: usize) -> u64 {
    let (a0, a1) = betti(a, w, h);
    let (b0, b1) = betti(b, w, h);
    (a0 as i64 - b0 as i64).unsigned_abs() + (a1 as i64 - b1 as i64).unsigned_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> (Vec<bool>, usize, usize) {
        let h = rows.len();
        let w = rows[0].len();
        let bin = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| c == '#'))
            .collect();
        (bin, w, h)
    }

    #[test]
    fn solid_block() {
        let (b, w, h) = from_rows(&["###", "###", "###"]);
        assert_eq!(betti(&b, w, h), (1, 0));
        assert_eq!(euler_characteristic(&b, w, h), 1);
    }

    #[test]
    fn ring_has_one_hole() {
        let (b, w, h) = from_rows(&["#####", "#...#", "#...#", "#...#", "#####"]);
        assert_eq!(betti(&b, w, h), (1, 1));
        assert_eq!(euler_characteristic(&b, w, h), 0);
    }

    #[test]
    fn two_blocks_vs_one() {
        let (a, w, h) = from_rows(&["##.##", "##.##"]);
        let (b, _, _) = from_rows(&["##...", "##..."]);
        assert_eq!(beta_err(&a, &b, w, h), 1);
        assert_eq!(chi_err(&a, &b, w, h), 1);
    }

    #[test]
    fn diagonal_touch_is_connected_fg() {
        let (b, w, h) = from_rows(&["#.", ".#"]);
        assert_eq!(betti(&b, w, h).0, 1);
    }

    #[test]
    fn border_touching_background_not_a_hole() {
        let (b, w, h) = from_rows(&["###", "#.#", "#.#"]);
        assert_eq!(betti(&b, w, h), (1, 0));
    }
}
