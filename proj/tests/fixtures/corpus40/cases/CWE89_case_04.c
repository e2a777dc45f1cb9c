/* CWE89_case_04 line 1 */
/* CWE89_case_04 line 2 */
/* CWE89_case_04 line 3 */
/* CWE89_case_04 line 4 */
/* CWE89_case_04 line 5 */
/* CWE89_case_04 line 6 */
/* CWE89_case_04 line 7 */
/* CWE89_case_04 line 8 */
/* CWE89_case_04 line 9 */
/* CWE89_case_04 line 10 */
/* CWE89_case_04 line 11 */
/* CWE89_case_04 line 12 */
/* CWE89_case_04 line 13 */
/* CWE89_case_04 line 14 */
/* CWE89_case_04 line 15 */
/* CWE89_case_04 line 16 */
/* CWE89_case_04 line 17 */
/* CWE89_case_04 line 18 */
/* CWE89_case_04 line 19 */
/* CWE89_case_04 line 20 */
/* CWE89_case_04 line 21 */
/* CWE89_case_04 line 22 */
/* CWE89_case_04 line 23 */
/* CWE89_case_04 line 24 */
/* CWE89_case_04 line 25 */
/* CWE89_case_04 line 26 */
/* CWE89_case_04 line 27 */
/* CWE89_case_04 line 28 */
/* CWE89_case_04 line 29 */
/* CWE89_case_04 line 30 */
/* CWE89_case_04 line 31 */
/* CWE89_case_04 line 32 */
/* CWE89_case_04 line 33 */
/* CWE89_case_04 line 34 */
/* CWE89_case_04 line 35 */
/* CWE89_case_04 line 36 */
/* CWE89_case_04 line 37 */
/* CWE89_case_04 line 38 */
/* CWE89_case_04 line 39 */
/* CWE89_case_04 line 40 */
/* CWE89_case_04 line 41 */
/* CWE89_case_04 line 42 */
/* CWE89_case_04 line 43 */
/* CWE89_case_04 line 44 */
/* CWE89_case_04 line 45 */
/* CWE89_case_04 line 46 */
/* CWE89_case_04 line 47 */
/* CWE89_case_04 line 48 */
/* CWE89_case_04 line 49 */
/* CWE89_case_04 line 50 */
/* CWE89_case_04 line 51 */
/* CWE89_case_04 line 52 */
/* CWE89_case_04 line 53 */
/* CWE89_case_04 line 54 */
/* CWE89_case_04 line 55 */
/* CWE89_case_04 line 56 */
/* CWE89_case_04 line 57 */
/* CWE89_case_04 line 58 */
/* CWE89_case_04 line 59 */
/* CWE89_case_04 line 60 */
