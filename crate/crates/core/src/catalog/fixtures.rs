// Generated from the shipped catalog lists; `catalog verify` checks the two agree.

pub(crate) struct Fixture {
    pub length: usize,
    pub cardinality: usize,
    pub codes: &'static [&'static [u32]],
}

pub(crate) const FIXTURES: &[Fixture] = &[
    Fixture {
        length: 4,
        cardinality: 7,
        codes: &[
            &[0, 1, 14, 35, 50, 71, 74],
            &[0, 13, 26, 32, 42, 46, 61],
            &[0, 4, 11, 34, 47, 70, 77],
        ],
    },
    Fixture {
        length: 4,
        cardinality: 8,
        codes: &[
            &[0, 13, 26, 32, 42, 46, 61, 65],
            &[0, 4, 11, 34, 47, 70, 77, 78],
        ],
    },
    Fixture {
        length: 4,
        cardinality: 9,
        codes: &[&[0, 13, 26, 32, 42, 46, 61, 65, 75]],
    },
    Fixture {
        length: 5,
        cardinality: 10,
        codes: &[
            &[0, 1, 41, 80, 98, 128, 140, 185, 197, 227],
            &[0, 4, 11, 34, 101, 142, 209, 232, 239, 240],
            &[0, 4, 38, 79, 97, 131, 132, 137, 182, 196],
            &[0, 4, 38, 79, 97, 131, 137, 182, 196, 230],
            &[0, 4, 38, 79, 97, 131, 137, 182, 196, 231],
        ],
    },
    Fixture {
        length: 6,
        cardinality: 12,
        codes: &[
            &[0, 13, 113, 123, 223, 227, 289, 399, 431, 566, 586, 696],
            &[0, 13, 26, 113, 123, 223, 289, 308, 399, 586, 659, 696],
            &[0, 13, 26, 113, 231, 285, 385, 389, 399, 410, 545, 582],
            &[0, 13, 26, 113, 231, 285, 385, 389, 399, 410, 545, 586],
            &[0, 13, 26, 113, 231, 285, 385, 389, 399, 410, 545, 694],
            &[0, 13, 26, 113, 231, 285, 385, 389, 410, 545, 586, 696],
            &[0, 13, 26, 32, 123, 289, 385, 389, 399, 420, 586, 707],
            &[0, 13, 26, 32, 123, 289, 466, 470, 480, 640, 663, 707],
            &[0, 13, 26, 32, 96, 223, 227, 237, 289, 447, 586, 626],
            &[0, 13, 26, 32, 96, 223, 227, 289, 447, 480, 586, 626],
            &[0, 13, 26, 32, 96, 223, 289, 447, 470, 480, 586, 626],
            &[0, 13, 26, 32, 96, 223, 289, 447, 470, 586, 626, 723],
            &[0, 13, 26, 32, 96, 223, 289, 447, 480, 586, 626, 713],
            &[0, 13, 26, 32, 96, 262, 383, 447, 613, 709, 713, 723],
            &[0, 13, 26, 32, 96, 262, 464, 640, 690, 709, 713, 723],
            &[0, 13, 26, 32, 96, 289, 447, 466, 470, 480, 586, 626],
            &[0, 13, 26, 32, 96, 289, 447, 466, 470, 480, 586, 707],
            &[0, 13, 26, 32, 96, 289, 447, 466, 470, 586, 626, 723],
            &[0, 13, 32, 107, 123, 289, 304, 389, 399, 586, 654, 697],
            &[0, 13, 32, 107, 123, 304, 399, 461, 586, 654, 697, 716],
            &[0, 13, 32, 107, 232, 285, 308, 385, 399, 582, 626, 694],
            &[0, 13, 32, 96, 127, 237, 269, 466, 470, 554, 620, 654],
            &[0, 13, 32, 96, 134, 153, 311, 457, 480, 613, 670, 707],
            &[0, 13, 32, 96, 134, 262, 461, 475, 554, 613, 654, 723],
            &[0, 13, 32, 96, 223, 269, 289, 447, 635, 639, 670, 704],
            &[0, 13, 32, 96, 223, 269, 289, 480, 635, 670, 681, 704],
            &[0, 13, 32, 96, 223, 269, 370, 480, 635, 670, 681, 704],
            &[0, 13, 32, 96, 223, 269, 383, 447, 470, 480, 613, 670],
            &[0, 13, 32, 96, 223, 269, 451, 480, 635, 670, 681, 704],
            &[0, 13, 32, 96, 237, 269, 289, 447, 466, 641, 654, 697],
            &[0, 13, 32, 96, 237, 269, 383, 447, 466, 470, 554, 613],
            &[0, 13, 32, 96, 237, 269, 383, 447, 466, 470, 554, 654],
            &[0, 13, 32, 96, 237, 311, 370, 411, 626, 690, 709, 713],
            &[0, 13, 53, 113, 222, 285, 397, 410, 554, 582, 669, 682],
            &[0, 13, 53, 113, 222, 285, 410, 554, 582, 669, 682, 686],
            &[0, 4, 11, 115, 236, 290, 394, 401, 402, 412, 547, 587],
            &[0, 4, 11, 115, 236, 290, 394, 401, 412, 547, 587, 699],
            &[0, 4, 11, 115, 236, 290, 394, 402, 412, 547, 587, 698],
            &[0, 4, 11, 124, 239, 293, 385, 398, 421, 556, 590, 699],
            &[0, 4, 11, 124, 240, 294, 385, 398, 421, 556, 591, 698],
            &[0, 4, 11, 34, 101, 304, 425, 628, 695, 718, 725, 726],
            &[0, 4, 119, 239, 290, 380, 416, 483, 554, 590, 610, 680],
            &[0, 4, 119, 240, 290, 380, 416, 482, 555, 591, 610, 681],
            &[0, 4, 38, 101, 149, 218, 322, 358, 421, 455, 636, 695],
            &[0, 4, 38, 101, 149, 322, 358, 393, 421, 461, 699, 707],
            &[0, 4, 38, 101, 150, 218, 322, 358, 421, 456, 635, 695],
            &[0, 4, 38, 101, 150, 322, 358, 392, 421, 461, 698, 708],
            &[0, 4, 38, 104, 286, 294, 384, 392, 455, 551, 655, 668],
            &[0, 4, 38, 104, 286, 303, 311, 428, 591, 632, 655, 695],
            &[0, 4, 38, 124, 241, 293, 383, 421, 461, 555, 591, 682],
            &[0, 4, 38, 124, 241, 293, 383, 421, 554, 591, 668, 682],
            &[0, 4, 38, 124, 241, 293, 383, 421, 555, 591, 668, 682],
            &[0, 4, 38, 124, 241, 293, 384, 421, 461, 555, 590, 682],
            &[0, 4, 38, 124, 241, 293, 384, 421, 555, 590, 668, 682],
            &[0, 4, 38, 124, 241, 294, 383, 421, 461, 555, 591, 682],
            &[0, 4, 38, 124, 241, 294, 383, 421, 555, 591, 668, 682],
            &[0, 4, 38, 50, 97, 205, 267, 464, 474, 537, 623, 646],
            &[0, 4, 38, 50, 97, 231, 267, 448, 464, 565, 618, 623],
            &[0, 4, 38, 51, 124, 241, 293, 421, 461, 554, 590, 627],
            &[0, 4, 38, 51, 97, 205, 266, 465, 473, 536, 623, 646],
            &[0, 4, 38, 51, 97, 230, 266, 448, 465, 565, 617, 623],
            &[0, 4, 38, 79, 131, 230, 294, 340, 380, 555, 668, 682],
            &[0, 4, 38, 79, 131, 294, 340, 380, 473, 636, 668, 682],
            &[0, 4, 38, 79, 131, 312, 425, 439, 473, 583, 618, 623],
            &[0, 4, 38, 79, 131, 312, 425, 439, 473, 583, 618, 704],
            &[0, 4, 38, 79, 131, 312, 425, 439, 473, 618, 623, 664],
            &[0, 4, 38, 79, 131, 312, 425, 439, 473, 618, 664, 704],
            &[0, 4, 38, 79, 131, 312, 425, 439, 473, 636, 664, 704],
            &[0, 4, 38, 79, 97, 131, 137, 294, 473, 618, 668, 682],
            &[0, 4, 38, 79, 97, 131, 299, 456, 623, 668, 682, 716],
            &[0, 4, 38, 79, 97, 131, 299, 456, 623, 668, 682, 717],
            &[0, 4, 38, 79, 97, 132, 299, 455, 623, 668, 682, 716],
            &[0, 4, 38, 79, 97, 132, 299, 455, 623, 668, 682, 717],
            &[0, 4, 38, 79, 97, 137, 230, 294, 374, 668, 682, 717],
            &[0, 4, 38, 79, 97, 230, 294, 374, 380, 668, 682, 717],
            &[0, 4, 38, 79, 97, 230, 294, 374, 623, 668, 682, 717],
            &[0, 4, 38, 79, 97, 231, 293, 375, 380, 668, 682, 716],
            &[0, 4, 38, 79, 97, 231, 293, 375, 623, 668, 682, 716],
            &[0, 4, 38, 79, 97, 293, 421, 618, 623, 668, 682, 716],
            &[0, 4, 38, 79, 97, 294, 421, 617, 623, 668, 682, 716],
            &[0, 4, 38, 79, 97, 299, 421, 623, 668, 682, 716, 717],
            &[0, 4, 38, 97, 131, 267, 473, 542, 618, 646, 655, 695],
            &[0, 4, 38, 97, 131, 267, 473, 565, 618, 623, 668, 682],
            &[0, 4, 38, 97, 131, 294, 299, 403, 591, 668, 682, 716],
            &[0, 4, 38, 97, 131, 294, 322, 380, 473, 591, 655, 695],
            &[0, 4, 38, 97, 146, 221, 267, 455, 474, 591, 682, 695],
            &[0, 4, 38, 97, 146, 222, 266, 456, 473, 590, 682, 695],
            &[0, 4, 38, 97, 159, 266, 448, 465, 473, 590, 655, 695],
            &[0, 4, 38, 97, 230, 266, 375, 565, 623, 668, 682, 717],
            &[0, 4, 38, 97, 230, 266, 389, 448, 465, 565, 617, 668],
            &[0, 4, 38, 97, 230, 266, 389, 448, 465, 565, 618, 668],
            &[0, 4, 38, 97, 266, 308, 421, 618, 623, 682, 707, 717],
            &[0, 4, 38, 97, 294, 299, 421, 590, 632, 682, 707, 717],
        ],
    },
    Fixture {
        length: 6,
        cardinality: 13,
        codes: &[
            &[0, 13, 26, 113, 231, 285, 385, 389, 399, 410, 545, 582, 694],
            &[0, 13, 32, 96, 237, 269, 383, 447, 466, 470, 554, 613, 654],
            &[0, 13, 53, 113, 222, 285, 397, 410, 554, 582, 669, 682, 686],
        ],
    },
    Fixture {
        length: 7,
        cardinality: 16,
        codes: &[
            &[
                0, 13, 110, 277, 426, 458, 797, 885, 929, 1258, 1342, 1455, 1804, 1841, 1934, 2004,
            ],
            &[
                0, 13, 110, 277, 610, 662, 798, 887, 1202, 1419, 1599, 1723, 1865, 1924, 2101, 2124,
            ],
            &[
                0, 13, 110, 277, 663, 801, 878, 1021, 1203, 1339, 1424, 1561, 1761, 2032, 2081,
                2124,
            ],
        ],
    },
    Fixture {
        length: 8,
        cardinality: 20,
        codes: &[
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3418, 3539, 3760, 3821, 3849, 5074,
                5087, 5206, 5340, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3418, 3539, 3760, 3821, 3849, 5074,
                5087, 5206, 5343, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3418, 3539, 3859, 3872, 4975, 5036,
                5064, 5206, 5337, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3418, 3539, 3859, 3872, 4975, 5036,
                5064, 5206, 5340, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3418, 3539, 3859, 3872, 4975, 5036,
                5064, 5206, 5343, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3421, 3620, 3760, 3821, 3849, 5074,
                5087, 5206, 5337, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3421, 3620, 3760, 3821, 3849, 5074,
                5087, 5206, 5340, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3421, 3620, 3760, 3821, 3849, 5074,
                5087, 5206, 5343, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3421, 3620, 3859, 3872, 4975, 5036,
                5064, 5206, 5337, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3421, 3620, 3859, 3872, 4975, 5036,
                5064, 5206, 5340, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2016, 2074, 2508, 2588, 3421, 3620, 3859, 3872, 4975, 5036,
                5064, 5206, 5343, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3418, 3539, 3760, 3821, 3849, 5074,
                5087, 5206, 5340, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3418, 3539, 3760, 3821, 3849, 5074,
                5087, 5206, 5343, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3418, 3539, 3859, 3872, 4975, 5036,
                5064, 5206, 5337, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3418, 3539, 3859, 3872, 4975, 5036,
                5064, 5206, 5340, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3418, 3539, 3859, 3872, 4975, 5036,
                5064, 5206, 5343, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3421, 3620, 3760, 3821, 3849, 5074,
                5087, 5206, 5337, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3421, 3620, 3760, 3821, 3849, 5074,
                5087, 5206, 5340, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3421, 3620, 3859, 3872, 4975, 5036,
                5064, 5206, 5337, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2502, 2560, 3421, 3620, 3859, 3872, 4975, 5036,
                5064, 5206, 5340, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2533, 2670, 3421, 3620, 3859, 3872, 4975, 5036,
                5064, 5233, 5256, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2022, 2102, 2533, 2670, 3421, 3620, 3859, 3872, 4975, 5036,
                5064, 5233, 5337, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2047, 2178, 2502, 2560, 3418, 3539, 3760, 3821, 3849, 5074,
                5087, 5181, 5261, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2047, 2181, 2502, 2560, 3418, 3539, 3760, 3821, 3849, 5074,
                5087, 5181, 5261, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2047, 2181, 2502, 2560, 3418, 3539, 3859, 3872, 4975, 5036,
                5064, 5181, 5261, 6094, 6293,
            ],
            &[
                0, 13, 110, 1006, 1202, 2047, 2181, 2502, 2560, 3421, 3620, 3760, 3821, 3849, 5074,
                5087, 5181, 5261, 6091, 6212,
            ],
            &[
                0, 13, 110, 1006, 1202, 2047, 2184, 2502, 2560, 3418, 3539, 3760, 3821, 3849, 5074,
                5087, 5181, 5261, 6094, 6293,
            ],
            &[
                0, 13, 110, 1015, 1202, 2004, 2102, 2499, 2610, 3409, 3539, 3760, 3821, 3849, 4993,
                5060, 5260, 5310, 6097, 6239,
            ],
            &[
                0, 13, 110, 1015, 1202, 2004, 2102, 2499, 2610, 3409, 3539, 3778, 3845, 4975, 5036,
                5064, 5260, 5310, 6097, 6239,
            ],
            &[
                0, 13, 110, 1015, 1202, 2004, 2102, 2499, 2610, 3424, 3566, 3760, 3821, 3849, 4993,
                5060, 5260, 5310, 6082, 6212,
            ],
            &[
                0, 13, 110, 1015, 1202, 2004, 2102, 2499, 2610, 3424, 3566, 3778, 3845, 4975, 5036,
                5064, 5260, 5310, 6082, 6212,
            ],
            &[
                0, 13, 110, 1015, 1202, 2004, 2151, 2499, 2588, 3424, 3566, 3760, 3821, 3849, 4993,
                5060, 5260, 5283, 6082, 6212,
            ],
            &[
                0, 13, 110, 1015, 1202, 2013, 2102, 2490, 2637, 3409, 3539, 3760, 3821, 3849, 4993,
                5060, 5260, 5283, 6097, 6239,
            ],
            &[
                0, 13, 110, 1015, 1202, 2101, 2124, 2490, 2637, 3409, 3539, 3778, 3845, 4975, 5036,
                5064, 5172, 5261, 6097, 6239,
            ],
            &[
                0, 13, 110, 1015, 1205, 2019, 2093, 2151, 2570, 2670, 3409, 3539, 3760, 3849, 4993,
                5039, 5260, 5283, 6097, 6239,
            ],
            &[
                0, 13, 110, 1015, 1205, 2019, 2093, 2151, 2570, 2670, 3409, 3539, 3778, 3824, 4975,
                5064, 5260, 5283, 6097, 6239,
            ],
            &[
                0, 13, 110, 1015, 1205, 2019, 2093, 2151, 2570, 2670, 3424, 3566, 3760, 3849, 4993,
                5039, 5260, 5283, 6082, 6212,
            ],
            &[
                0, 13, 110, 1015, 1205, 2019, 2093, 2151, 2570, 2670, 3424, 3566, 3778, 3824, 4975,
                5064, 5260, 5283, 6082, 6212,
            ],
            &[
                0, 13, 110, 1015, 1205, 2084, 2184, 2505, 2579, 2637, 3409, 3539, 3760, 3849, 4993,
                5039, 5260, 5283, 6097, 6239,
            ],
            &[
                0, 13, 110, 1015, 1205, 2084, 2184, 2505, 2579, 2637, 3424, 3566, 3760, 3849, 4993,
                5039, 5260, 5283, 6082, 6212,
            ],
            &[
                0, 13, 110, 1015, 1205, 2101, 2124, 2505, 2579, 2637, 3424, 3566, 3760, 3849, 4993,
                5039, 5243, 5343, 6082, 6212,
            ],
            &[
                0, 13, 110, 286, 878, 1113, 1938, 2151, 2603, 2806, 2991, 3578, 3606, 4191, 5083,
                5149, 5267, 5932, 6155, 6468,
            ],
            &[
                0, 13, 113, 285, 350, 937, 1290, 1403, 2410, 3224, 4015, 4153, 4268, 4326, 4925,
                5245, 6012, 6231, 6307, 6521,
            ],
            &[
                0, 13, 113, 285, 370, 917, 1290, 1423, 2410, 3224, 3995, 4153, 4268, 4326, 4925,
                5245, 6012, 6231, 6307, 6521,
            ],
            &[
                0, 13, 113, 285, 399, 917, 1261, 1452, 2410, 3224, 3995, 4153, 4268, 4326, 4925,
                5245, 6012, 6202, 6307, 6521,
            ],
            &[
                0, 13, 113, 296, 416, 879, 1295, 1384, 2424, 3259, 4011, 4137, 4261, 4361, 4960,
                5313, 5902, 6271, 6309, 6455,
            ],
            &[
                0, 13, 113, 296, 416, 952, 1295, 1311, 2424, 3259, 4084, 4137, 4261, 4361, 4960,
                5313, 5902, 6198, 6309, 6455,
            ],
            &[
                0, 13, 113, 308, 366, 917, 1276, 1419, 2424, 3205, 3995, 4137, 4261, 4361, 4906,
                5259, 6010, 6217, 6309, 6509,
            ],
            &[
                0, 13, 113, 308, 366, 952, 1241, 1419, 2424, 3205, 4030, 4137, 4261, 4361, 4906,
                5259, 6010, 6182, 6309, 6509,
            ],
            &[
                0, 13, 26, 113, 1014, 1384, 1415, 1884, 1990, 2491, 2576, 2769, 3043, 3153, 4352,
                4717, 4935, 5567, 5955, 6055,
            ],
            &[
                0, 13, 26, 113, 1014, 1384, 1415, 1884, 1990, 2557, 2653, 2991, 3741, 4352, 4983,
                5097, 5203, 5567, 5893, 5978,
            ],
            &[
                0, 13, 353, 466, 870, 1371, 1661, 1911, 2768, 3080, 3193, 3583, 4173, 4203, 5037,
                5395, 5657, 5929, 6131, 6175,
            ],
            &[
                0, 13, 353, 709, 878, 1365, 1905, 2394, 2560, 3335, 3501, 3950, 3963, 4219, 4907,
                5098, 5389, 5510, 5929, 5987,
            ],
            &[
                0, 13, 53, 329, 447, 961, 1425, 2046, 2449, 2761, 3077, 3413, 3636, 4038, 5056,
                5564, 5892, 6313, 6356, 6467,
            ],
            &[
                0, 13, 53, 329, 447, 961, 1425, 2046, 2684, 2761, 3077, 3178, 3636, 4038, 5056,
                5564, 5892, 6121, 6232, 6548,
            ],
            &[
                0, 13, 53, 329, 682, 829, 1068, 2067, 2613, 3382, 3705, 3845, 4118, 4288, 4930,
                5070, 5276, 5426, 5823, 6455,
            ],
            &[
                0, 13, 53, 329, 682, 902, 1068, 2067, 2613, 3382, 3705, 3772, 4045, 4361, 4930,
                5070, 5203, 5426, 5823, 6455,
            ],
        ],
    },
    Fixture {
        length: 9,
        cardinality: 27,
        codes: &[
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14886, 14926, 15020, 15863, 15900, 15985, 18295, 18326,
                18417,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14886, 14926, 15020, 15865, 15896, 15987, 18293, 18330,
                18415,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14886, 14927, 15019, 15862, 15900, 15986, 18296, 18325,
                18417,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14886, 14927, 15019, 15866, 15895, 15987, 18292, 18330,
                18416,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14886, 14930, 15016, 15865, 15897, 15986, 18293, 18325,
                18420,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14887, 14927, 15018, 15861, 15901, 15986, 18296, 18324,
                18418,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14887, 14927, 15018, 15866, 15894, 15988, 18291, 18331,
                18416,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14887, 14930, 15015, 15864, 15898, 15986, 18293, 18324,
                18421,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11230, 11315, 11352, 14890, 14930, 15012, 15864, 15895, 15989, 18290, 18327,
                18421,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6325, 6437, 6555, 7821, 7915, 7955, 10256, 10347,
                10378, 11241, 11281, 11375, 14875, 14960, 14997, 15863, 15900, 15985, 18295, 18326,
                18417,
            ],
            &[
                0, 121, 242, 3164, 3282, 3394, 6363, 6457, 6497, 7783, 7895, 8013, 10276, 10307,
                10398, 11241, 11281, 11375, 14875, 14960, 14997, 15863, 15900, 15985, 18275, 18366,
                18397,
            ],
        ],
    },
];
