#include "quadgen/baselines.hpp"

namespace quadgen {

// Joe-Kuo direction numbers (new-joe-kuo-6 ordering), dimensions 2..64.
extern const char* const kSobolDirectionTable;
const char* const kSobolDirectionTable =
    "d       s       a       m_i\n"
    "2	1	0	1\n"
    "3	2	1	1 3\n"
    "4	3	1	1 3 1\n"
    "5	3	2	1 1 1\n"
    "6	4	1	1 1 3 3\n"
    "7	4	4	1 3 5 13\n"
    "8	5	2	1 1 5 5 17\n"
    "9	5	4	1 1 5 5 5\n"
    "10	5	7	1 1 7 11 19\n"
    "11	5	11	1 1 5 1 1\n"
    "12	5	13	1 1 1 3 11\n"
    "13	5	14	1 3 5 5 31\n"
    "14	6	1	1 3 3 9 7 49\n"
    "15	6	13	1 1 1 15 21 21\n"
    "16	6	16	1 3 1 13 27 49\n"
    "17	6	19	1 1 1 15 7 5\n"
    "18	6	22	1 3 1 15 13 25\n"
    "19	6	25	1 1 5 5 19 61\n"
    "20	7	1	1 3 7 11 23 15 103\n"
    "21	7	4	1 3 7 13 13 15 69\n"
    "22	7	7	1 1 3 13 7 35 63\n"
    "23	7	8	1 3 5 9 1 25 53\n"
    "24	7	14	1 3 1 13 9 35 107\n"
    "25	7	19	1 3 1 5 27 61 31\n"
    "26	7	21	1 1 5 11 19 41 61\n"
    "27	7	28	1 3 5 3 3 13 69\n"
    "28	7	31	1 1 7 13 1 19 1\n"
    "29	7	32	1 3 7 5 13 19 59\n"
    "30	7	37	1 1 3 9 25 29 41\n"
    "31	7	41	1 3 5 13 23 1 55\n"
    "32	7	42	1 3 7 3 13 59 17\n"
    "33	7	50	1 3 1 3 5 53 69\n"
    "34	7	55	1 1 5 5 23 33 13\n"
    "35	7	56	1 1 7 7 1 61 123\n"
    "36	7	59	1 1 7 9 13 61 49\n"
    "37	7	62	1 3 3 5 3 55 33\n"
    "38	8	14	1 3 1 15 31 13 49 245\n"
    "39	8	21	1 3 5 15 31 59 63 97\n"
    "40	8	22	1 3 1 11 11 11 77 249\n"
    "41	8	38	1 3 1 11 27 43 71 9\n"
    "42	8	47	1 1 7 15 21 11 81 45\n"
    "43	8	49	1 3 7 3 25 31 65 79\n"
    "44	8	50	1 3 1 1 19 11 3 205\n"
    "45	8	52	1 1 5 9 19 21 29 157\n"
    "46	8	56	1 3 7 11 1 33 89 185\n"
    "47	8	67	1 3 3 3 15 9 79 71\n"
    "48	8	70	1 3 7 11 15 39 119 27\n"
    "49	8	84	1 1 3 1 11 31 97 225\n"
    "50	8	97	1 1 1 3 23 43 57 177\n"
    "51	8	103	1 3 7 7 17 17 37 71\n"
    "52	8	115	1 3 1 5 27 63 123 213\n"
    "53	8	122	1 1 3 5 11 43 53 133\n"
    "54	9	8	1 3 5 5 29 17 47 173 479\n"
    "55	9	13	1 3 3 11 3 1 109 9 69\n"
    "56	9	16	1 1 1 5 17 39 23 5 343\n"
    "57	9	22	1 3 1 5 25 15 31 103 499\n"
    "58	9	25	1 1 1 11 11 17 63 105 183\n"
    "59	9	44	1 1 5 11 9 29 97 231 363\n"
    "60	9	47	1 1 5 15 19 45 41 7 383\n"
    "61	9	52	1 3 7 7 31 19 83 137 221\n"
    "62	9	55	1 1 1 3 23 15 111 223 83\n"
    "63	9	59	1 1 5 13 31 15 55 25 161\n"
    "64	9	62	1 1 3 13 25 47 39 87 257\n"
    ;

}  // namespace quadgen
