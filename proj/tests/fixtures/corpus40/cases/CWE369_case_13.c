/* CWE369_case_13 line 1 */
/* CWE369_case_13 line 2 */
/* CWE369_case_13 line 3 */
/* CWE369_case_13 line 4 */
/* CWE369_case_13 line 5 */
/* CWE369_case_13 line 6 */
/* CWE369_case_13 line 7 */
/* CWE369_case_13 line 8 */
/* CWE369_case_13 line 9 */
/* CWE369_case_13 line 10 */
/* CWE369_case_13 line 11 */
/* CWE369_case_13 line 12 */
/* CWE369_case_13 line 13 */
/* CWE369_case_13 line 14 */
/* CWE369_case_13 line 15 */
/* CWE369_case_13 line 16 */
/* CWE369_case_13 line 17 */
/* CWE369_case_13 line 18 */
/* CWE369_case_13 line 19 */
/* CWE369_case_13 line 20 */
/* CWE369_case_13 line 21 */
/* CWE369_case_13 line 22 */
/* CWE369_case_13 line 23 */
/* CWE369_case_13 line 24 */
/* CWE369_case_13 line 25 */
/* CWE369_case_13 line 26 */
/* CWE369_case_13 line 27 */
/* CWE369_case_13 line 28 */
/* CWE369_case_13 line 29 */
/* CWE369_case_13 line 30 */
/* CWE369_case_13 line 31 */
/* CWE369_case_13 line 32 */
/* CWE369_case_13 line 33 */
/* CWE369_case_13 line 34 */
/* CWE369_case_13 line 35 */
/* CWE369_case_13 line 36 */
/* CWE369_case_13 line 37 */
/* CWE369_case_13 line 38 */
/* CWE369_case_13 line 39 */
/* CWE369_case_13 line 40 */
/* CWE369_case_13 line 41 */
/* CWE369_case_13 line 42 */
/* CWE369_case_13 line 43 */
/* CWE369_case_13 line 44 */
/* CWE369_case_13 line 45 */
/* CWE369_case_13 line 46 */
/* CWE369_case_13 line 47 */
/* CWE369_case_13 line 48 */
/* CWE369_case_13 line 49 */
/* CWE369_case_13 line 50 */
/* CWE369_case_13 line 51 */
/* CWE369_case_13 line 52 */
/* CWE369_case_13 line 53 */
/* CWE369_case_13 line 54 */
/* CWE369_case_13 line 55 */
/* CWE369_case_13 line 56 */
/* CWE369_case_13 line 57 */
/* CWE369_case_13 line 58 */
/* CWE369_case_13 line 59 */
/* CWE369_case_13 line 60 */
